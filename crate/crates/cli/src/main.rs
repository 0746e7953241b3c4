//! `chebkex`: evaluation, benchmarks and protocol demos for Chebyshev
//! polynomial key agreement.
//!
//! Exit status is 0 on success, 1 when a protocol check fails and 2 on a
//! usage error.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use chebkex::chebyshev::Engine;
use clap::{Args, Parser, Subcommand};

use output::Format;

#[derive(Parser, Debug)]
#[command(name = "chebkex", version, about)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Working precision in decimal digits.
    #[arg(long, global = true, default_value_t = 300)]
    pub digits: u32,
    /// Leading digits both sides must share.
    #[arg(long, global = true, default_value_t = 100)]
    pub agree: u32,
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Lines)]
    pub format: Format,
    /// Session configuration file of key=value lines
    /// (digits, agree_digits, max_index_digits, min_security_bits).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate T_n(x) with one or all engines.
    Eval {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long)]
        n: String,
        /// Engine name or "all".
        #[arg(long, default_value = "all")]
        engine: String,
    },
    /// Time full two-party negotiations and print CSV-style rows.
    Bench {
        /// Precisions to run; defaults to --digits.
        #[arg(long, value_delimiter = ',')]
        digits_list: Vec<u32>,
        /// Decimal digits of the combined index a*b, split between the parties.
        #[arg(long, value_delimiter = ',', default_value = "200")]
        index_digits: Vec<u32>,
        #[arg(long, value_delimiter = ',', default_value = "recurrence,trig,matrix,cayley")]
        engine: Vec<Engine>,
        #[arg(long, default_value_t = 1)]
        reps: u32,
    },
    /// Two-party key agreement with hash confirmation.
    Keyex {
        /// Digits of each party's secret index.
        #[arg(long, default_value_t = 60)]
        index_digits: u32,
        #[arg(long, default_value = "matrix")]
        engine: Engine,
    },
    /// Three-party conference key.
    Conf3 {
        #[arg(long, default_value_t = 40)]
        index_digits: u32,
    },
    /// Encrypt and decrypt an integer with the El Gamal variant.
    Elgamal {
        #[arg(long)]
        message: String,
        #[arg(long, default_value_t = 60)]
        index_digits: u32,
    },
    /// Interactive signature over a document the signer holds.
    Sign {
        /// Document the verifier asks about.
        #[arg(long)]
        doc: String,
        /// Document actually held by the signer; defaults to --doc.
        #[arg(long)]
        held: Option<String>,
        #[arg(long, default_value_t = 60)]
        index_digits: u32,
    },
    /// Group secret applied member by member, or its threshold variant.
    Group {
        #[arg(long, default_value_t = 3)]
        members: usize,
        #[arg(long, default_value_t = 20)]
        index_digits: u32,
        /// Polynomial degree m: any m+1 shares recover the group index.
        #[arg(long)]
        threshold: Option<usize>,
        #[arg(long, default_value_t = 5)]
        shares: usize,
    },
    /// Secret on behalf of a group and the rounding fingerprint of each peer.
    Behalf {
        #[arg(long, default_value_t = 3)]
        peers: usize,
        /// Digits of each peer's index.
        #[arg(long, default_value_t = 35)]
        index_digits: u32,
        /// Digits of Alice's index.
        #[arg(long, default_value_t = 105)]
        alice_digits: u32,
    },
    /// Shamir sharing over a prime field.
    #[command(subcommand)]
    Shamir(ShamirCommand),
    /// Quantum attack cost table.
    Qccost {
        #[arg(long, default_value_t = 2048)]
        rsa_bits: u32,
        /// Index widths for the Grover rows.
        #[arg(long, value_delimiter = ',', default_value = "1024,2048")]
        bits: Vec<u32>,
    },
    /// Answer proof-of-knowledge and key-agreement sessions over TCP.
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        bind: String,
        #[arg(long, default_value_t = chebkex::wire::DEFAULT_PORT)]
        port: u16,
        /// Serve exactly one session and exit with its status.
        #[arg(long)]
        once: bool,
        /// Stop after this many sessions.
        #[arg(long, conflicts_with = "once")]
        sessions: Option<usize>,
        /// Write the published x and y to this file for clients to pin.
        #[arg(long)]
        publish: Option<PathBuf>,
        #[command(flatten)]
        session: SessionArgs,
    },
    /// Authenticate a server and agree on a key.
    Connect {
        /// host:port of the server.
        #[arg(long)]
        peer: String,
        /// File with the server's expected x and y; without it the
        /// parameters are trusted on first use.
        #[arg(long)]
        pin: Option<PathBuf>,
        /// Store the server's parameters here after a successful session.
        #[arg(long)]
        save_pin: Option<PathBuf>,
        #[command(flatten)]
        session: SessionArgs,
    },
}

#[derive(Args, Debug, Clone)]
pub struct SessionArgs {
    #[arg(long, default_value_t = 60)]
    pub index_digits: u32,
    #[arg(long, default_value_t = 128)]
    pub min_security_bits: u32,
    /// Seconds to wait for each message.
    #[arg(long, default_value_t = 30)]
    pub timeout: u64,
}

#[derive(Subcommand, Debug)]
enum ShamirCommand {
    /// Split a secret into shares printed as z and y.
    Deal {
        #[arg(long)]
        secret: String,
        #[arg(long)]
        threshold: usize,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        prime: String,
    },
    /// Recover the secret from shares given as z:y.
    Reconstruct {
        #[arg(long)]
        threshold: usize,
        #[arg(long)]
        prime: String,
        #[arg(long = "share", required = true)]
        shares: Vec<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let c = &cli.common;
    let result = match cli.command {
        Command::Eval { x, n, engine } => commands::eval(c, &x, &n, &engine),
        Command::Bench {
            digits_list,
            index_digits,
            engine,
            reps,
        } => commands::bench(c, &digits_list, &index_digits, &engine, reps),
        Command::Keyex {
            index_digits,
            engine,
        } => commands::keyex(c, index_digits, engine),
        Command::Conf3 { index_digits } => commands::conf3(c, index_digits),
        Command::Elgamal {
            message,
            index_digits,
        } => commands::elgamal(c, &message, index_digits),
        Command::Sign {
            doc,
            held,
            index_digits,
        } => commands::sign(c, &doc, held.as_deref(), index_digits),
        Command::Group {
            members,
            index_digits,
            threshold,
            shares,
        } => commands::group(c, members, index_digits, threshold, shares),
        Command::Behalf {
            peers,
            index_digits,
            alice_digits,
        } => commands::behalf(c, peers, index_digits, alice_digits),
        Command::Shamir(ShamirCommand::Deal {
            secret,
            threshold,
            count,
            prime,
        }) => commands::shamir_deal(c, &secret, threshold, count, &prime),
        Command::Shamir(ShamirCommand::Reconstruct {
            threshold,
            prime,
            shares,
        }) => commands::shamir_reconstruct(c, threshold, &prime, &shares),
        Command::Qccost { rsa_bits, bits } => commands::qccost(c, rsa_bits, &bits),
        Command::Serve {
            bind,
            port,
            once,
            sessions,
            publish,
            session,
        } => {
            let limit = if once { Some(1) } else { sessions };
            commands::serve(c, &session, &bind, port, limit, publish.as_deref())
        }
        Command::Connect {
            peer,
            pin,
            save_pin,
            session,
        } => commands::connect(c, &session, &peer, pin.as_deref(), save_pin.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("chebkex: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
