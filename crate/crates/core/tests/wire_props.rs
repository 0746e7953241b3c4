use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::{Arc, Mutex};
use std::thread;

use chebkex::bigreal::render_fixed;
use chebkex::protocols::{keygen, AuthParty};
use chebkex::sampling;
use chebkex::wire::{
    connect, respond, Kind, SessionConfig, WireError, WireMessage, DEFAULT_TIMEOUT, MAX_LINE,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn field() -> impl Strategy<Value = String> {
    "[!-~&&[^\t]]{1,40}"
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn codec_round_trip(kind in 0usize..6, fields in prop::collection::vec(field(), 0..8)) {
        let m = WireMessage::new(Kind::ALL[kind], fields).unwrap();
        prop_assert_eq!(WireMessage::decode(&m.encode()).unwrap(), m);
    }

    #[test]
    fn pub_with_300_digit_values(seed in any::<u64>()) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let x = sampling::symmetric_decimal(99, 300, &mut rng).unwrap();
        let y = sampling::symmetric_decimal(99, 300, &mut rng).unwrap();
        let m = WireMessage::new(Kind::Pub, vec![render_fixed(&x, 300), render_fixed(&y, 300)]).unwrap();
        prop_assert_eq!(WireMessage::decode(&m.encode()).unwrap(), m);
    }

    #[test]
    fn truncation_is_rejected(kind in 0usize..6, fields in prop::collection::vec(field(), 1..5), cut in 1usize..8) {
        let bytes = WireMessage::new(Kind::ALL[kind], fields).unwrap().encode();
        let cut = cut.min(bytes.len());
        let is_malformed = matches!(
            WireMessage::decode(&bytes[..bytes.len() - cut]),
            Err(WireError::MalformedMessage(_))
        );
        prop_assert!(is_malformed);
    }
}

#[test]
fn overlong_line_is_rejected() {
    let mut line = b"PUB\t".to_vec();
    line.extend(std::iter::repeat_n(b'7', MAX_LINE));
    line.push(b'\n');
    assert!(matches!(
        WireMessage::decode(&line),
        Err(WireError::MalformedMessage(_))
    ));
}

fn cfg() -> SessionConfig {
    SessionConfig {
        digits: 150,
        agree_digits: 60,
        max_index_digits: 40,
        min_security_bits: 128,
    }
}

/// Forwards lines both ways; the `n`-th line (0-based, counted over both
/// directions in arrival order) of kind CHAL or RESP gets one digit changed.
fn tamper_proxy(
    upstream: std::net::SocketAddr,
    target: usize,
) -> (std::net::SocketAddr, Arc<Mutex<Vec<String>>>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let seen = Arc::new(Mutex::new(Vec::new()));
    let log = Arc::clone(&seen);
    thread::spawn(move || {
        let (client, _) = listener.accept().unwrap();
        let server = TcpStream::connect(upstream).unwrap();
        let counter = Arc::new(Mutex::new(0usize));
        let pipe = |from: TcpStream,
                    mut to: TcpStream,
                    counter: Arc<Mutex<usize>>,
                    log: Arc<Mutex<Vec<String>>>| {
            thread::spawn(move || {
                let mut r = BufReader::new(from);
                let mut line = String::new();
                while r.read_line(&mut line).map(|n| n > 0).unwrap_or(false) {
                    if line.starts_with("CHAL\t") || line.starts_with("RESP\t") {
                        let mut c = counter.lock().unwrap();
                        if *c == target {
                            line = mutate(&line);
                        }
                        *c += 1;
                    }
                    log.lock()
                        .unwrap()
                        .push(line.split('\t').next().unwrap().trim().to_string());
                    if to.write_all(line.as_bytes()).is_err() {
                        break;
                    }
                    line.clear();
                }
                let _ = to.shutdown(std::net::Shutdown::Write);
            })
        };
        let a = pipe(
            client.try_clone().unwrap(),
            server.try_clone().unwrap(),
            Arc::clone(&counter),
            Arc::clone(&log),
        );
        let b = pipe(server, client, counter, log);
        let _ = a.join();
        let _ = b.join();
    });
    (addr, seen)
}

/// Changes one character of the last field: a digit 20 places after the
/// point for reals, the first hex digit for tags.
fn mutate(line: &str) -> String {
    let body = line.trim_end_matches('\n');
    let (head, last) = body.rsplit_once('\t').unwrap();
    let mut last = last.to_string();
    let idx = last.find('.').map(|p| p + 20).unwrap_or(0);
    let c = last.as_bytes()[idx];
    let repl = if c == b'0' { '1' } else { '0' };
    last.replace_range(idx..idx + 1, &repl.to_string());
    format!("{head}\t{last}\n")
}

#[test]
fn any_tampered_challenge_or_response_fails_before_confirm() {
    let (secret, public) = keygen(
        None,
        40,
        cfg().precision().unwrap(),
        &mut ChaCha20Rng::seed_from_u64(3),
    )
    .unwrap();
    let keys = AuthParty { secret, public };
    // CHAL pok, RESP pok, CHAL kex, RESP kex
    for target in 0..4 {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let upstream = listener.local_addr().unwrap();
        let k = keys.clone();
        let server = thread::spawn(move || {
            let (s, _) = listener.accept().unwrap();
            respond(s, &k, &cfg(), DEFAULT_TIMEOUT)
        });
        let (proxy, log) = tamper_proxy(upstream, target);
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let client = connect(proxy, Some(&keys.public), &cfg(), DEFAULT_TIMEOUT, &mut rng);
        let server = server.join().unwrap();
        assert!(client.is_err(), "target {target}");
        assert!(server.is_err(), "target {target}");
        // the proxy may still be flushing the last line
        thread::sleep(std::time::Duration::from_millis(50));
        let kinds = log.lock().unwrap().clone();
        let fail = kinds.iter().position(|k| k == "FAIL").expect("FAIL sent");
        assert!(!kinds[..fail].iter().any(|k| k == "CONFIRM"), "{kinds:?}");
    }
}
