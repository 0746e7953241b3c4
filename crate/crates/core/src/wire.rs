//! Line-oriented wire protocol for proof of knowledge plus authenticated key
//! agreement between two processes.
//!
//! Every message is `KIND\tfield\t...\n`, ASCII, at most [`MAX_LINE`] bytes.
//! A session runs strictly in turns:
//!
//! ```text
//! initiator                         responder
//! HELLO 1 D N G bits        ->
//!                           <-      HELLO 1 D N G bits
//!                           <-      PUB x y
//! CHAL pok T_r(x)           ->
//!                           <-      RESP pok T_s(T_r(x))
//! CHAL kex T_r'(x)          ->
//!                           <-      RESP kex tag tag'
//! CONFIRM digits tag        ->
//!                           <-      CONFIRM digits tag
//! ```
//!
//! Either side answers a failed check with `FAIL reason` and closes. The
//! key-exchange tags are checked before any `CONFIRM` is sent, so tampering
//! with a challenge or response always surfaces as `FAIL` first.

use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::str::FromStr;
use std::sync::Arc;
use std::time::Duration;

use rand::RngCore;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::bigreal::{render_fixed, Real};
use crate::protocols::{
    pok_challenge, pok_respond, pok_verify, settle, AuthParty, Confirmation, Precision,
    ProtocolError, PublicParams, SessionKey, Transcript, TranscriptLine, FALLBACK_DIGITS,
};

pub const DEFAULT_PORT: u16 = 7311;
pub const MAX_LINE: usize = 64 * 1024;
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);
pub const PROTOCOL_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WireError {
    #[error("malformed message: {0}")]
    MalformedMessage(String),
    #[error("session configuration mismatch: ours {ours}, theirs {theirs}")]
    ConfigMismatch { ours: String, theirs: String },
    #[error("invalid session configuration: {0}")]
    BadConfig(String),
    #[error("peer failed to authenticate")]
    AuthFailed,
    #[error("key confirmation failed")]
    KeyMismatch,
    #[error("timed out waiting for the peer")]
    Timeout,
    #[error("peer aborted: {0}")]
    PeerFailed(String),
    #[error("expected {expected}, got {got}")]
    Unexpected { expected: String, got: String },
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
}

impl From<std::io::Error> for WireError {
    fn from(e: std::io::Error) -> Self {
        match e.kind() {
            std::io::ErrorKind::WouldBlock | std::io::ErrorKind::TimedOut => WireError::Timeout,
            _ => WireError::Io(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, WireError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Hello,
    Pub,
    Chal,
    Resp,
    Confirm,
    Fail,
}

impl Kind {
    pub const ALL: [Kind; 6] = [
        Kind::Hello,
        Kind::Pub,
        Kind::Chal,
        Kind::Resp,
        Kind::Confirm,
        Kind::Fail,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Hello => "HELLO",
            Kind::Pub => "PUB",
            Kind::Chal => "CHAL",
            Kind::Resp => "RESP",
            Kind::Confirm => "CONFIRM",
            Kind::Fail => "FAIL",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Kind {
    type Err = WireError;

    fn from_str(s: &str) -> Result<Kind> {
        Kind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| WireError::MalformedMessage(format!("unknown kind {s:?}")))
    }
}

/// Reason codes carried by `FAIL`.
pub mod reason {
    pub const CONFIG_MISMATCH: &str = "config_mismatch";
    pub const AUTH_FAILED: &str = "auth_failed";
    pub const KEY_MISMATCH: &str = "key_mismatch";
    pub const MALFORMED: &str = "malformed";
    pub const INTERNAL: &str = "internal";
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WireMessage {
    pub kind: Kind,
    pub fields: Vec<String>,
}

fn check_field(f: &str) -> Result<()> {
    if f.is_empty() {
        return Err(WireError::MalformedMessage("empty field".into()));
    }
    if let Some(c) = f.chars().find(|c| !c.is_ascii_graphic()) {
        return Err(WireError::MalformedMessage(format!("field contains {c:?}")));
    }
    Ok(())
}

impl WireMessage {
    pub fn new(kind: Kind, fields: Vec<String>) -> Result<WireMessage> {
        for f in &fields {
            check_field(f)?;
        }
        let msg = WireMessage { kind, fields };
        if msg.encoded_len() > MAX_LINE {
            return Err(WireError::MalformedMessage(format!(
                "message exceeds {MAX_LINE} bytes"
            )));
        }
        Ok(msg)
    }

    fn encoded_len(&self) -> usize {
        self.kind.as_str().len() + self.fields.iter().map(|f| f.len() + 1).sum::<usize>() + 1
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut line = self.kind.as_str().to_string();
        for f in &self.fields {
            line.push('\t');
            line.push_str(f);
        }
        line.push('\n');
        line.into_bytes()
    }

    /// Parses one complete line including its terminating LF.
    pub fn decode(bytes: &[u8]) -> Result<WireMessage> {
        if bytes.len() > MAX_LINE {
            return Err(WireError::MalformedMessage(format!(
                "line exceeds {MAX_LINE} bytes"
            )));
        }
        let body = bytes
            .strip_suffix(b"\n")
            .ok_or_else(|| WireError::MalformedMessage("truncated line".into()))?;
        let text = std::str::from_utf8(body)
            .map_err(|_| WireError::MalformedMessage("non-ASCII line".into()))?;
        let mut parts = text.split('\t');
        let kind: Kind = parts.next().unwrap_or_default().parse()?;
        WireMessage::new(kind, parts.map(str::to_string).collect())
    }

    fn fail(reason: &str) -> WireMessage {
        WireMessage {
            kind: Kind::Fail,
            fields: vec![reason.to_string()],
        }
    }
}

/// Parameters both peers must agree on before any key material moves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SessionConfig {
    pub digits: u32,
    pub agree_digits: u32,
    pub max_index_digits: u32,
    pub min_security_bits: u32,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            digits: 300,
            agree_digits: 100,
            max_index_digits: 60,
            min_security_bits: 128,
        }
    }
}

impl SessionConfig {
    pub fn precision(&self) -> Result<Precision> {
        Precision::new(self.digits, self.agree_digits, self.max_index_digits)
            .map_err(|e| WireError::BadConfig(e.to_string()))
    }

    /// Bits of a `max_index_digits`-digit index.
    pub fn index_bits(&self) -> u32 {
        (f64::from(self.max_index_digits.saturating_sub(1)) * std::f64::consts::LOG2_10) as u32
    }

    pub fn validate(&self) -> Result<()> {
        self.precision()?;
        if self.index_bits() < self.min_security_bits {
            return Err(WireError::BadConfig(format!(
                "{}-digit indices give {} bits, below the required {}",
                self.max_index_digits,
                self.index_bits(),
                self.min_security_bits
            )));
        }
        Ok(())
    }

    fn hello_fields(&self) -> Vec<String> {
        vec![
            PROTOCOL_VERSION.to_string(),
            self.digits.to_string(),
            self.agree_digits.to_string(),
            self.max_index_digits.to_string(),
            self.min_security_bits.to_string(),
        ]
    }

    fn describe(fields: &[String]) -> String {
        fields.join("/")
    }

    /// Parses `key=value` lines; blank lines and `#` comments are skipped.
    pub fn from_kv(text: &str) -> Result<SessionConfig> {
        let mut cfg = SessionConfig::default();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                WireError::BadConfig(format!("line {}: expected key=value", no + 1))
            })?;
            let v: u32 = v.trim().parse().map_err(|_| {
                WireError::BadConfig(format!("line {}: {:?} is not a number", no + 1, v.trim()))
            })?;
            match k.trim() {
                "digits" => cfg.digits = v,
                "agree_digits" => cfg.agree_digits = v,
                "max_index_digits" => cfg.max_index_digits = v,
                "min_security_bits" => cfg.min_security_bits = v,
                other => {
                    return Err(WireError::BadConfig(format!(
                        "line {}: unknown key {other:?}",
                        no + 1
                    )))
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_kv(&self) -> String {
        format!(
            "digits={}\nagree_digits={}\nmax_index_digits={}\nmin_security_bits={}\n",
            self.digits, self.agree_digits, self.max_index_digits, self.min_security_bits
        )
    }
}

/// Public parameters as `x=...` / `y=...` lines at full precision.
pub fn pin_to_text(params: &PublicParams) -> String {
    let d = params.digits();
    format!(
        "x={}\ny={}\n",
        render_fixed(&params.x, d),
        render_fixed(&params.y, d)
    )
}

pub fn pin_from_text(text: &str, config: &SessionConfig) -> Result<PublicParams> {
    let (mut x, mut y) = (None, None);
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        match line.split_once('=') {
            Some(("x", v)) => x = Some(v.to_string()),
            Some(("y", v)) => y = Some(v.to_string()),
            _ => {
                return Err(WireError::BadConfig(format!(
                    "unexpected pin line {line:?}"
                )))
            }
        }
    }
    let (Some(x), Some(y)) = (x, y) else {
        return Err(WireError::BadConfig("pin needs x and y".into()));
    };
    Ok(PublicParams {
        x: parse_real(&x, config.digits)?,
        y: parse_real(&y, config.digits)?,
        precision: config.precision()?,
    })
}

fn parse_real(s: &str, digits: u32) -> Result<Real> {
    Real::from_decimal(s, digits).map_err(|e| WireError::MalformedMessage(e.to_string()))
}

/// One side of a connection: reads and writes whole lines and records them.
pub struct Conn<S: Read + Write> {
    reader: BufReader<S>,
    role: &'static str,
    peer_role: &'static str,
    transcript: Transcript,
}

impl Conn<TcpStream> {
    pub fn tcp(stream: TcpStream, role: &'static str, timeout: Duration) -> Result<Self> {
        stream.set_read_timeout(Some(timeout))?;
        stream.set_write_timeout(Some(timeout))?;
        stream.set_nodelay(true)?;
        Ok(Conn::new(stream, role))
    }
}

impl<S: Read + Write> Conn<S> {
    pub fn new(stream: S, role: &'static str) -> Self {
        let peer_role = if role == INITIATOR {
            RESPONDER
        } else {
            INITIATOR
        };
        Conn {
            reader: BufReader::new(stream),
            role,
            peer_role,
            transcript: Transcript::default(),
        }
    }

    fn record(&mut self, sender: &str, msg: &WireMessage) {
        self.transcript.lines.push(TranscriptLine {
            step: msg.kind.as_str().to_string(),
            sender: sender.to_string(),
            values: msg.fields.clone(),
        });
    }

    pub fn send(&mut self, msg: &WireMessage) -> Result<()> {
        let stream = self.reader.get_mut();
        stream.write_all(&msg.encode())?;
        stream.flush()?;
        let role = self.role;
        self.record(role, msg);
        Ok(())
    }

    pub fn recv(&mut self) -> Result<WireMessage> {
        let mut buf = Vec::new();
        let n = self
            .reader
            .by_ref()
            .take(MAX_LINE as u64)
            .read_until(b'\n', &mut buf)?;
        if n == 0 {
            return Err(WireError::Io("connection closed by peer".into()));
        }
        let msg = WireMessage::decode(&buf)?;
        let peer = self.peer_role;
        self.record(peer, &msg);
        Ok(msg)
    }

    /// Receives a message of `kind`, turning `FAIL` into `PeerFailed`.
    fn expect(&mut self, kind: Kind, arity: usize) -> Result<Vec<String>> {
        let msg = self.recv()?;
        if msg.kind == Kind::Fail {
            return Err(WireError::PeerFailed(msg.fields.join(" ")));
        }
        if msg.kind != kind || msg.fields.len() != arity {
            return Err(WireError::Unexpected {
                expected: format!("{kind} with {arity} fields"),
                got: format!("{} with {} fields", msg.kind, msg.fields.len()),
            });
        }
        Ok(msg.fields)
    }

    /// Sends `FAIL` for a locally detected error, best effort.
    fn abort(&mut self, err: WireError) -> WireError {
        let code = match &err {
            WireError::ConfigMismatch { .. } | WireError::BadConfig(_) => reason::CONFIG_MISMATCH,
            WireError::AuthFailed => reason::AUTH_FAILED,
            WireError::KeyMismatch => reason::KEY_MISMATCH,
            WireError::MalformedMessage(_) | WireError::Unexpected { .. } => reason::MALFORMED,
            WireError::PeerFailed(_) | WireError::Io(_) | WireError::Timeout => return err,
            WireError::Protocol(_) => reason::INTERNAL,
        };
        let _ = self.send(&WireMessage::fail(code));
        err
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn into_transcript(self) -> Transcript {
        self.transcript
    }
}

pub const INITIATOR: &str = "initiator";
pub const RESPONDER: &str = "responder";

/// Result of a completed session.
#[derive(Clone, Debug)]
pub struct WireOutcome {
    pub key: SessionKey,
    /// Responder parameters as received; pinned copy when one was given.
    pub peer: Option<PublicParams>,
    pub transcript: Transcript,
}

impl WireOutcome {
    /// Hex digest printed by the demo peers: SHA-256 over the key bytes.
    pub fn key_digest(&self) -> String {
        hex::encode(Sha256::digest(self.key.key_bytes))
    }
}

fn msg(kind: Kind, fields: Vec<String>) -> Result<WireMessage> {
    WireMessage::new(kind, fields)
}

fn check_hello(ours: &SessionConfig, fields: &[String]) -> Result<()> {
    let mine = ours.hello_fields();
    if fields != mine.as_slice() {
        return Err(WireError::ConfigMismatch {
            ours: SessionConfig::describe(&mine),
            theirs: SessionConfig::describe(fields),
        });
    }
    Ok(())
}

fn expect_label(fields: &[String], label: &str) -> Result<()> {
    if fields.first().map(String::as_str) != Some(label) {
        return Err(WireError::Unexpected {
            expected: label.to_string(),
            got: fields.first().cloned().unwrap_or_default(),
        });
    }
    Ok(())
}

fn tag_at(raw: &Real, digits: u32) -> String {
    Confirmation::of(raw, digits).to_hex()[0].clone()
}

/// Serves one session on an accepted stream.
pub fn run_responder<S: Read + Write>(
    conn: &mut Conn<S>,
    keys: &AuthParty,
    config: &SessionConfig,
) -> Result<SessionKey> {
    config.validate()?;
    if keys.public.precision != config.precision()? {
        return Err(WireError::BadConfig(
            "published parameters were made for another precision".into(),
        ));
    }
    let d = config.digits;
    let hello = conn.expect(Kind::Hello, 5)?;
    if let Err(e) = check_hello(config, &hello) {
        return Err(conn.abort(e));
    }
    conn.send(&msg(Kind::Hello, config.hello_fields())?)?;
    conn.send(&msg(
        Kind::Pub,
        vec![
            render_fixed(&keys.public.x, d),
            render_fixed(&keys.public.y, d),
        ],
    )?)?;

    let chal = conn.expect(Kind::Chal, 2)?;
    expect_label(&chal, "pok").map_err(|e| conn.abort(e))?;
    let challenge = parse_real(&chal[1], d).map_err(|e| conn.abort(e))?;
    let response = pok_respond(&keys.secret, &challenge)?;
    conn.send(&msg(
        Kind::Resp,
        vec!["pok".into(), render_fixed(&response, d)],
    )?)?;

    let chal = conn.expect(Kind::Chal, 2)?;
    expect_label(&chal, "kex").map_err(|e| conn.abort(e))?;
    let r_value = parse_real(&chal[1], d).map_err(|e| conn.abort(e))?;
    let raw = pok_respond(&keys.secret, &r_value)?;
    let [primary, fallback] = Confirmation::of(&raw, config.agree_digits).to_hex();
    conn.send(&msg(Kind::Resp, vec!["kex".into(), primary, fallback])?)?;

    let confirm = conn.expect(Kind::Confirm, 2)?;
    let used: u32 = confirm[0]
        .parse()
        .map_err(|_| conn.abort(WireError::MalformedMessage("bad digit count".into())))?;
    let fallback_level = config.agree_digits.saturating_sub(FALLBACK_DIGITS).max(1);
    if (used != config.agree_digits && used != fallback_level) || confirm[1] != tag_at(&raw, used) {
        return Err(conn.abort(WireError::KeyMismatch));
    }
    conn.send(&msg(
        Kind::Confirm,
        vec![used.to_string(), tag_at(&raw, used)],
    )?)?;
    Ok(SessionKey::derive(&raw, used))
}

/// Runs the initiator side. With `pinned` the received `PUB` must render
/// identically; without it the received parameters are trusted on first use
/// and returned in the outcome.
pub fn run_initiator<S: Read + Write>(
    conn: &mut Conn<S>,
    pinned: Option<&PublicParams>,
    config: &SessionConfig,
    rng: &mut dyn RngCore,
) -> Result<(SessionKey, PublicParams)> {
    config.validate()?;
    let prec = config.precision()?;
    let d = config.digits;
    conn.send(&msg(Kind::Hello, config.hello_fields())?)?;
    let hello = conn.expect(Kind::Hello, 5)?;
    if let Err(e) = check_hello(config, &hello) {
        return Err(conn.abort(e));
    }

    let fields = conn.expect(Kind::Pub, 2)?;
    let received = PublicParams {
        x: parse_real(&fields[0], d).map_err(|e| conn.abort(e))?,
        y: parse_real(&fields[1], d).map_err(|e| conn.abort(e))?,
        precision: prec,
    };
    let params = match pinned {
        Some(p) => {
            let same = render_fixed(&p.x, d) == fields[0] && render_fixed(&p.y, d) == fields[1];
            if !same {
                return Err(conn.abort(WireError::AuthFailed));
            }
            PublicParams {
                precision: prec,
                ..p.clone()
            }
        }
        None => received,
    };

    let (r, challenge) = pok_challenge(&params, rng)?;
    conn.send(&msg(
        Kind::Chal,
        vec!["pok".into(), render_fixed(&challenge, d)],
    )?)?;
    let resp = conn.expect(Kind::Resp, 2)?;
    expect_label(&resp, "pok").map_err(|e| conn.abort(e))?;
    let response = parse_real(&resp[1], d).map_err(|e| conn.abort(e))?;
    if !pok_verify(&r, &response, &params)? {
        return Err(conn.abort(WireError::AuthFailed));
    }

    let (r2, r_value) = pok_challenge(&params, rng)?;
    conn.send(&msg(
        Kind::Chal,
        vec!["kex".into(), render_fixed(&r_value, d)],
    )?)?;
    let resp = conn.expect(Kind::Resp, 3)?;
    expect_label(&resp, "kex").map_err(|e| conn.abort(e))?;
    let peer_tags = Confirmation::from_hex(&resp[1], &resp[2])
        .ok_or_else(|| conn.abort(WireError::MalformedMessage("bad confirmation tags".into())))?;
    let raw = crate::protocols::pok_respond(&r2, &params.y)?;
    let key = match settle(&raw, config.agree_digits, &peer_tags) {
        Ok(k) => k,
        Err(ProtocolError::KeyMismatch { .. }) => return Err(conn.abort(WireError::KeyMismatch)),
        Err(e) => return Err(e.into()),
    };
    let used = key.digits_used;
    conn.send(&msg(
        Kind::Confirm,
        vec![used.to_string(), tag_at(&raw, used)],
    )?)?;
    let confirm = conn.expect(Kind::Confirm, 2)?;
    if confirm[0] != used.to_string() || confirm[1] != tag_at(&raw, used) {
        return Err(conn.abort(WireError::KeyMismatch));
    }
    Ok((key, params))
}

/// Connects to `addr` and runs the initiator.
pub fn connect<A: ToSocketAddrs>(
    addr: A,
    pinned: Option<&PublicParams>,
    config: &SessionConfig,
    timeout: Duration,
    rng: &mut dyn RngCore,
) -> Result<WireOutcome> {
    let addr = addr
        .to_socket_addrs()?
        .next()
        .ok_or_else(|| WireError::Io("address did not resolve".into()))?;
    let stream = TcpStream::connect_timeout(&addr, timeout)?;
    let mut conn = Conn::tcp(stream, INITIATOR, timeout)?;
    let (key, peer) = run_initiator(&mut conn, pinned, config, rng)?;
    Ok(WireOutcome {
        key,
        peer: Some(peer),
        transcript: conn.into_transcript(),
    })
}

/// Runs one responder session on an accepted stream.
pub fn respond(
    stream: TcpStream,
    keys: &AuthParty,
    config: &SessionConfig,
    timeout: Duration,
) -> Result<WireOutcome> {
    let mut conn = Conn::tcp(stream, RESPONDER, timeout)?;
    let key = run_responder(&mut conn, keys, config)?;
    Ok(WireOutcome {
        key,
        peer: None,
        transcript: conn.into_transcript(),
    })
}

pub type SessionReport = dyn Fn(SocketAddr, Result<WireOutcome>) + Send + Sync;

/// Accepts connections and serves each on its own thread. Returns after
/// `limit` sessions have finished, or never when `limit` is `None`.
pub fn serve(
    listener: &TcpListener,
    keys: Arc<AuthParty>,
    config: SessionConfig,
    timeout: Duration,
    limit: Option<usize>,
    report: Arc<SessionReport>,
) -> Result<()> {
    config.validate()?;
    std::thread::scope(|scope| -> Result<()> {
        let mut served = 0usize;
        while limit.is_none_or(|l| served < l) {
            let (stream, peer) = listener.accept()?;
            served += 1;
            let keys = Arc::clone(&keys);
            let report = Arc::clone(&report);
            scope.spawn(move || report(peer, respond(stream, &keys, &config, timeout)));
        }
        Ok(())
    })
}
