//! One function per subcommand. Each builds its inputs from the seed, runs
//! the library operation and prints a [`Table`].

use std::fmt;
use std::net::TcpListener;
use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use chebkex::bigreal::{agreement_digits, render_fixed, Real, RealError};
use chebkex::chebyshev::{self, ChebError, Degree, Engine, RECURRENCE_LIMIT};
use chebkex::modfield::{self, FieldError, PrimeField, Share};
use chebkex::protocols::{self as proto, Channel, Precision, ProtocolError, SecretKey};
use chebkex::qc_cost::{self, QcError};
use chebkex::wire::{self, SessionConfig, WireError};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rug::Integer;
use sha2::{Digest, Sha256};

use crate::output::Table;
use crate::{Common, SessionArgs};

#[derive(Debug)]
pub enum Failure {
    /// Bad arguments or parameters.
    Usage(String),
    /// A protocol check rejected the run.
    Protocol(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Protocol(_) => 1,
            Failure::Usage(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage: {m}"),
            Failure::Protocol(m) => write!(f, "protocol failure: {m}"),
        }
    }
}

impl From<ProtocolError> for Failure {
    fn from(e: ProtocolError) -> Self {
        match e {
            ProtocolError::BadParams(_)
            | ProtocolError::MessageTooLarge { .. }
            | ProtocolError::Real(_)
            | ProtocolError::Cheb(_)
            | ProtocolError::Field(_) => Failure::Usage(e.to_string()),
            _ => Failure::Protocol(e.to_string()),
        }
    }
}

impl From<WireError> for Failure {
    fn from(e: WireError) -> Self {
        match e {
            WireError::BadConfig(_) => Failure::Usage(e.to_string()),
            WireError::Protocol(p) => p.into(),
            _ => Failure::Protocol(e.to_string()),
        }
    }
}

macro_rules! usage_from {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Failure::Usage(e.to_string())
            }
        }
    )*};
}
usage_from!(RealError, ChebError, FieldError, QcError);

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Protocol(format!("i/o: {e}"))
    }
}

type Result<T = ()> = std::result::Result<T, Failure>;

fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn parse_int(what: &str, s: &str) -> Result<Integer> {
    s.trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("{what}: {s:?} is not an integer")))
}

/// Session parameters from `--config` when given, else from the flags.
fn session_config(c: &Common, index_digits: u32, min_security_bits: u32) -> Result<SessionConfig> {
    let cfg = match &c.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            SessionConfig::from_kv(&text)?
        }
        None => SessionConfig {
            digits: c.digits,
            agree_digits: c.agree,
            max_index_digits: index_digits,
            min_security_bits,
        },
    };
    cfg.precision()?;
    Ok(cfg)
}

fn precision(c: &Common, index_digits: u32) -> Result<Precision> {
    Ok(session_config(c, index_digits, 0)?.precision()?)
}

pub fn eval(c: &Common, x: &str, n: &str, engine: &str) -> Result {
    let d = c.digits;
    let x = Real::from_decimal(x, d)?;
    let n: Degree = n.parse()?;
    let engines: Vec<Engine> = if engine == "all" {
        Engine::ALL.to_vec()
    } else {
        vec![engine.parse().map_err(Failure::Usage)?]
    };
    let mut t = Table::new(&["engine", "digits", "n", "value", "muls", "adds"]);
    for e in engines {
        if e == Engine::Recurrence && *n.as_integer() >= RECURRENCE_LIMIT {
            eprintln!("recurrence skipped: n >= 2^32");
            continue;
        }
        let (v, ops) = chebyshev::eval_counted(&x, &n, e)?;
        t.push([
            e.name().to_string(),
            d.to_string(),
            n.to_string(),
            render_fixed(&v, d),
            ops.muls.to_string(),
            ops.adds.to_string(),
        ]);
    }
    Ok(t.print(c.format)?)
}

fn row_seed(seed: u64, d: u32, g: u32, rep: u32) -> u64 {
    seed ^ (u64::from(d) << 40) ^ (u64::from(g) << 20) ^ u64::from(rep)
}

pub fn bench(c: &Common, digits_list: &[u32], index_digits: &[u32], engines: &[Engine], reps: u32) -> Result {
    let digits_list = if digits_list.is_empty() {
        vec![c.digits]
    } else {
        digits_list.to_vec()
    };
    let mut t = Table::new(&[
        "engine",
        "digits",
        "index_digits",
        "wall_ms",
        "muls",
        "adds",
        "equal_digits",
    ]);
    for &d in &digits_list {
        for &g in index_digits {
            if g < 2 {
                return Err(Failure::Usage("combined index needs at least 2 digits".into()));
            }
            let (ga, gb) = (g.div_ceil(2), g / 2);
            let agree = (d / 3).max(1);
            let prec = Precision::new(d, agree, ga)?;
            for &engine in engines {
                for rep in 0..reps {
                    let mut r = rng(row_seed(c.seed, d, g, rep));
                    let x = proto::sample_x(d, &mut r)?;
                    let a = SecretKey::random(ga, &mut r);
                    let b = SecretKey::random(gb, &mut r);
                    let limit = Integer::from(RECURRENCE_LIMIT);
                    if engine == Engine::Recurrence
                        && (*a.index().as_integer() >= limit || *b.index().as_integer() >= limit)
                    {
                        eprintln!("recurrence skipped: D={d} G={g} index beyond 2^32");
                        continue;
                    }
                    let mut ch = Channel::new();
                    let start = Instant::now();
                    let (ka, kb, ops) = proto::dh_raw(&a, &b, &x, &prec, engine, &mut ch)?;
                    // a failed confirmation still yields a row
                    let _ = proto::dh_confirm(&ka, &kb, agree, &mut ch);
                    let wall = start.elapsed();
                    t.push([
                        engine.name().to_string(),
                        d.to_string(),
                        g.to_string(),
                        format!("{:.3}", wall.as_secs_f64() * 1e3),
                        ops.muls.to_string(),
                        ops.adds.to_string(),
                        agreement_digits(&ka, &kb).to_string(),
                    ]);
                }
            }
        }
    }
    Ok(t.print(c.format)?)
}

pub fn keyex(c: &Common, index_digits: u32, engine: Engine) -> Result {
    let prec = precision(c, index_digits)?;
    let mut r = rng(c.seed);
    let x = proto::sample_x(prec.digits, &mut r)?;
    let a = SecretKey::random(index_digits, &mut r);
    let b = SecretKey::random(index_digits, &mut r);
    let out = proto::negotiate_dh(&a, &b, &x, &prec, engine, &mut Channel::new())?;
    let mut t = Table::new(&["party", "key", "digits_used", "agreement"]);
    for (name, k) in [("alice", &out.alice), ("bob", &out.bob)] {
        t.push([
            name.to_string(),
            k.hex(),
            k.digits_used.to_string(),
            out.agreement.to_string(),
        ]);
    }
    Ok(t.print(c.format)?)
}

pub fn conf3(c: &Common, index_digits: u32) -> Result {
    let prec = precision(c, index_digits)?;
    let mut r = rng(c.seed);
    let x = proto::sample_x(prec.digits, &mut r)?;
    let secrets = [0; 3].map(|_| SecretKey::random(index_digits, &mut r));
    let keys = proto::run_conference(secrets, &x, &prec, &mut Channel::new())?;
    let mut t = Table::new(&["party", "key", "digits_used"]);
    for (name, k) in ["alice", "bob", "chiara"].iter().zip(&keys) {
        t.push([name.to_string(), k.hex(), k.digits_used.to_string()]);
    }
    Ok(t.print(c.format)?)
}

pub fn elgamal(c: &Common, message: &str, index_digits: u32) -> Result {
    let prec = precision(c, index_digits)?;
    let n = parse_int("message", message)?;
    let mut r = rng(c.seed);
    let (s, params) = proto::keygen(None, index_digits, prec, &mut r)?;
    let ct = proto::elgamal_encrypt(&params, &n, &mut r)?;
    let back = proto::elgamal_decrypt(&s, &ct)?;
    if back != n {
        return Err(Failure::Protocol(format!("decrypted {back}, sent {n}")));
    }
    let mut t = Table::new(&["message", "recovered", "q", "r"]);
    t.push([
        n.to_string(),
        back.to_string(),
        chebkex::bigreal::render_sci(&ct.q, 20),
        chebkex::bigreal::render_sci(&ct.r, 20),
    ]);
    Ok(t.print(c.format)?)
}

pub fn sign(c: &Common, doc: &str, held: Option<&str>, index_digits: u32) -> Result {
    let prec = precision(c, index_digits)?;
    let mut r = rng(c.seed);
    let (s, params) = proto::keygen(None, index_digits, prec, &mut r)?;
    let mut store = proto::DocumentStore::new();
    store.insert(held.unwrap_or(doc).as_bytes().to_vec());
    let sig = proto::run_signature(doc.as_bytes(), &params, &s, &store, &mut r, &mut Channel::new())?;
    let mut t = Table::new(&["document_sha256", "signature", "verified"]);
    t.push([
        hex::encode(Sha256::digest(doc.as_bytes())),
        hex::encode(sig),
        "true".to_string(),
    ]);
    Ok(t.print(c.format)?)
}

pub fn group(c: &Common, members: usize, index_digits: u32, threshold: Option<usize>, shares: usize) -> Result {
    let prec = precision(c, index_digits)?;
    let mut r = rng(c.seed);
    let mut t = Table::new(&["variant", "order", "agreement", "key"]);
    match threshold {
        None => {
            let (secrets, params) = proto::group_issue(None, members, index_digits, prec, &mut r)?;
            let alice = SecretKey::random(index_digits, &mut r);
            let big_r = chebyshev::eval(&params.x, alice.index(), proto::DEFAULT_ENGINE)?;
            let expected = chebyshev::eval(&params.y, alice.index(), proto::DEFAULT_ENGINE)?;
            let forward: Vec<&SecretKey> = secrets.iter().collect();
            let reverse: Vec<&SecretKey> = secrets.iter().rev().collect();
            for (name, order) in [("forward", forward), ("reverse", reverse)] {
                let v = proto::group_apply_chain(&big_r, &order)?;
                let agree = agreement_digits(&v, &expected);
                if agree < prec.agree_digits {
                    return Err(ProtocolError::KeyMismatch {
                        required: prec.agree_digits,
                    }
                    .into());
                }
                t.push([
                    "chain".to_string(),
                    name.to_string(),
                    agree.to_string(),
                    proto::SessionKey::derive(&v, prec.agree_digits).hex(),
                ]);
            }
        }
        Some(m) => {
            let (_, g) = proto::partial_group_issue(None, m, shares, index_digits, prec, &mut r)?;
            let alice = SecretKey::random(index_digits, &mut r);
            let big_r = chebyshev::eval(&g.public.x, alice.index(), proto::DEFAULT_ENGINE)?;
            let expected = chebyshev::eval(&g.public.y, alice.index(), proto::DEFAULT_ENGINE)?;
            for (name, picked) in [("first", &g.shares[..=m]), ("last", &g.shares[shares - m - 1..])] {
                let v = proto::partial_group_secret(picked, m, &g.field, &big_r)?;
                let agree = agreement_digits(&v, &expected);
                if agree < prec.agree_digits {
                    return Err(ProtocolError::KeyMismatch {
                        required: prec.agree_digits,
                    }
                    .into());
                }
                t.push([
                    "threshold".to_string(),
                    name.to_string(),
                    agree.to_string(),
                    proto::SessionKey::derive(&v, prec.agree_digits).hex(),
                ]);
            }
        }
    }
    Ok(t.print(c.format)?)
}

pub fn behalf(c: &Common, peers: usize, index_digits: u32, alice_digits: u32) -> Result {
    let prec = precision(c, alice_digits)?;
    let d = prec.digits;
    let mut r = rng(c.seed);
    let g = proto::behalf_issue(None, peers, index_digits, prec, &mut r)?;
    let alice_s = SecretKey::random(alice_digits, &mut r);
    let mut ch = Channel::new();
    let y_alice = chebyshev::eval(&g.public.x, alice_s.index(), proto::DEFAULT_ENGINE)?;
    let y_alice = ch.send_real("behalf.alice", "alice", &y_alice, d)?;
    let alice = chebyshev::eval(&g.public.y, alice_s.index(), proto::DEFAULT_ENGINE)?;
    let values: Vec<Real> = g
        .peers
        .iter()
        .map(|p| proto::behalf_secret(p, &y_alice))
        .collect::<std::result::Result<_, _>>()?;
    let fp = proto::group_fingerprint(&alice, &values, d);
    let mut t = Table::new(&["peer", "vs_alice", "onset_vs_next", "window_end_vs_next"]);
    for (i, v) in values.iter().enumerate() {
        let next = &values[(i + 1) % values.len()];
        let f = proto::fingerprint(v, next, d);
        let (start, end) = f
            .divergence_window
            .map(|(s, e)| (s.to_string(), e.to_string()))
            .unwrap_or(("none".into(), "none".into()));
        t.push([i.to_string(), agreement_digits(v, &alice).to_string(), start, end]);
    }
    t.print(c.format)?;
    let mut s = Table::new(&["summary_vs_alice", "summary_inter_peer_onset"]);
    s.push([
        fp.vs_alice.to_string(),
        fp.inter_peer_onset
            .map(|o| o.to_string())
            .unwrap_or_else(|| "none".into()),
    ]);
    Ok(s.print(c.format)?)
}

pub fn shamir_deal(c: &Common, secret: &str, threshold: usize, count: usize, prime: &str) -> Result {
    let field = PrimeField::new(parse_int("prime", prime)?)?;
    let secret = parse_int("secret", secret)?;
    let shares = modfield::shamir_deal(&secret, threshold, count, &field, &mut rng(c.seed))?;
    let mut t = Table::new(&["z", "y"]);
    for s in shares {
        t.push([s.z.to_string(), s.y.to_string()]);
    }
    Ok(t.print(c.format)?)
}

pub fn shamir_reconstruct(c: &Common, threshold: usize, prime: &str, shares: &[String]) -> Result {
    let field = PrimeField::new(parse_int("prime", prime)?)?;
    let shares: Vec<Share> = shares
        .iter()
        .map(|s| {
            let (z, y) = s
                .split_once(':')
                .ok_or_else(|| Failure::Usage(format!("share {s:?} is not z:y")))?;
            Ok(Share {
                z: parse_int("share z", z)?,
                y: parse_int("share y", y)?,
            })
        })
        .collect::<Result<_>>()?;
    let secret = modfield::shamir_reconstruct(&shares, threshold, &field)?;
    let mut t = Table::new(&["secret"]);
    t.push([secret.to_string()]);
    Ok(t.print(c.format)?)
}

pub fn qccost(c: &Common, rsa_bits: u32, bits: &[u32]) -> Result {
    let rows = qc_cost::attack_table(rsa_bits, bits)?;
    match c.format {
        crate::output::Format::Csv => {
            let mut t = Table::new(&["attack", "qubits", "ops_per_try", "qubits_sci", "ops_sci"]);
            for row in &rows {
                t.push([
                    row.attack.clone(),
                    row.estimate.qubits.to_string(),
                    row.estimate.ops_per_try.to_string(),
                    row.qubits_display(),
                    row.ops_display(),
                ]);
            }
            t.print(c.format)?;
        }
        crate::output::Format::Lines => {
            println!("Attack\tNumber of qubits\tNumber of operations per try");
            for row in &rows {
                println!("{}\t{}\t{}", row.attack, row.qubits_display(), row.ops_display());
            }
            if let Some(&widest) = bits.iter().max() {
                let gap = qc_cost::qubit_gap(widest)?;
                println!(
                    "n = {widest} bit Grover needs {:.3e} times the {} qubits of corrected RSA-breaking hardware; {:.3e} times today's devices",
                    gap.qubit_factor_over_rsa,
                    qc_cost::RSA_QUBITS_WITH_CORRECTION,
                    gap.distance_from_today
                );
            }
        }
    }
    Ok(())
}

fn timeout(s: &SessionArgs) -> Duration {
    Duration::from_secs(s.timeout)
}

pub fn serve(
    c: &Common,
    s: &SessionArgs,
    bind: &str,
    port: u16,
    limit: Option<usize>,
    publish: Option<&Path>,
) -> Result {
    let cfg = session_config(c, s.index_digits, s.min_security_bits)?;
    cfg.validate()?;
    let (secret, public) = proto::keygen(None, cfg.max_index_digits, cfg.precision()?, &mut rng(c.seed))?;
    if let Some(path) = publish {
        std::fs::write(path, wire::pin_to_text(&public))?;
    }
    let keys = Arc::new(proto::AuthParty { secret, public });
    let listener = TcpListener::bind((bind, port))
        .map_err(|e| Failure::Usage(format!("cannot bind {bind}:{port}: {e}")))?;
    println!("listening {}", listener.local_addr()?);
    use std::io::Write;
    std::io::stdout().flush()?;

    let format = c.format;
    let failures = Arc::new(std::sync::atomic::AtomicUsize::new(0));
    let failed = Arc::clone(&failures);
    let report: Arc<wire::SessionReport> = Arc::new(move |peer, outcome| {
        let mut t = Table::new(&["peer", "key"]);
        match outcome {
            Ok(o) => t.push([peer.to_string(), o.key_digest()]),
            Err(e) => {
                failed.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                eprintln!("session {peer} failed: {e}");
                t.push([peer.to_string(), "none".to_string()]);
            }
        }
        let _ = t.print(format);
    });
    wire::serve(&listener, keys, cfg, timeout(s), limit, report)?;
    match failures.load(std::sync::atomic::Ordering::SeqCst) {
        0 => Ok(()),
        n => Err(Failure::Protocol(format!("{n} session(s) failed"))),
    }
}

pub fn connect(c: &Common, s: &SessionArgs, peer: &str, pin: Option<&Path>, save_pin: Option<&Path>) -> Result {
    let cfg = session_config(c, s.index_digits, s.min_security_bits)?;
    cfg.validate()?;
    let pinned = match pin {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            Some(wire::pin_from_text(&text, &cfg)?)
        }
        None => None,
    };
    let outcome = wire::connect(peer, pinned.as_ref(), &cfg, timeout(s), &mut rng(c.seed))?;
    if let (Some(path), Some(p)) = (save_pin, &outcome.peer) {
        std::fs::write(path, wire::pin_to_text(p))?;
    }
    let mut t = Table::new(&["peer", "key"]);
    t.push([peer.to_string(), outcome.key_digest()]);
    Ok(t.print(c.format)?)
}
