//! Versioned text format for networks.
//!
//! ```text
//! sand-network 1
//! topology scale-free
//! seed 1
//! devices 4
//! features 2000 3
//! node 0 17 523 1999
//! ...
//! comm 0 1 23.456
//! ...
//! social 0 1 shared:17,acquaintance
//! ```
//!
//! Header lines come in exactly this order. Node records are dense and in id
//! order; `comm` and `social` records list each edge once with `u < v`, in
//! lexicographic order. Latencies are milliseconds with three decimals.
//! Saving the same network always yields the same bytes.

use std::io::{self, BufRead, Write};

use sand_core::{
    DeviceId, DeviceProfile, FeatureId, Latency, Network, NetworkError, RelationLabel, TopologyKind,
};
use thiserror::Error;

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "sand-network";

#[derive(Debug, Error)]
pub enum NetFileError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("unsupported network format version {found} (expected {FORMAT_VERSION})")]
    Version { found: String },
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Invariant { line: usize, source: NetworkError },
}

pub fn save_network<W: Write>(net: &Network, mut out: W) -> io::Result<()> {
    writeln!(out, "{MAGIC} {FORMAT_VERSION}")?;
    writeln!(out, "topology {}", net.kind())?;
    writeln!(out, "seed {}", net.seed())?;
    writeln!(out, "devices {}", net.len())?;
    writeln!(
        out,
        "features {} {}",
        net.feature_pool(),
        net.features_per_device()
    )?;
    for d in net.devices() {
        write!(out, "node {d}")?;
        for f in net.profile(d).features() {
            write!(out, " {f}")?;
        }
        writeln!(out)?;
    }
    for (u, v, latency) in net.comm_edges() {
        writeln!(out, "comm {u} {v} {latency}")?;
    }
    for (u, v, labels) in net.social_edges() {
        write!(out, "social {u} {v} ")?;
        for (i, label) in labels.iter().enumerate() {
            if i > 0 {
                out.write_all(b",")?;
            }
            write!(out, "{label}")?;
        }
        writeln!(out)?;
    }
    out.flush()
}

pub fn save_to_string(net: &Network) -> String {
    let mut buf = Vec::new();
    save_network(net, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

struct Lines<R> {
    inner: io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn next(&mut self) -> Result<Option<String>, NetFileError> {
        match self.inner.next() {
            Some(l) => {
                self.line += 1;
                Ok(Some(l?))
            }
            None => Ok(None),
        }
    }

    fn err(&self, msg: impl Into<String>) -> NetFileError {
        NetFileError::Malformed {
            line: self.line,
            msg: msg.into(),
        }
    }

    /// Next line, which must be `key value...`; returns the values.
    fn header(&mut self, key: &str) -> Result<Vec<String>, NetFileError> {
        let line = self
            .next()?
            .ok_or_else(|| self.err(format!("missing `{key}` header")))?;
        let mut parts = line.split_whitespace();
        if parts.next() != Some(key) {
            return Err(self.err(format!("expected `{key}` header")));
        }
        Ok(parts.map(str::to_owned).collect())
    }

    fn number<T: std::str::FromStr>(&self, s: &str, what: &str) -> Result<T, NetFileError> {
        s.parse()
            .map_err(|_| self.err(format!("invalid {what} `{s}`")))
    }
}

fn parse_latency(s: &str) -> Option<Latency> {
    let (whole, frac) = s.split_once('.')?;
    if frac.len() != 3 || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let ms: u32 = whole.parse().ok()?;
    let us: u32 = frac.parse().ok()?;
    Some(Latency::from_micros(ms.checked_mul(1000)?.checked_add(us)?))
}

pub fn load_network<R: BufRead>(input: R) -> Result<Network, NetFileError> {
    let mut lines = Lines {
        inner: input.lines(),
        line: 0,
    };

    let magic = lines.next()?.ok_or_else(|| lines.err("empty document"))?;
    let mut parts = magic.split_whitespace();
    if parts.next() != Some(MAGIC) {
        return Err(lines.err("not a sand network document"));
    }
    let version = parts.next().unwrap_or("").to_owned();
    if version != FORMAT_VERSION.to_string() {
        return Err(NetFileError::Version { found: version });
    }

    let topo = lines.header("topology")?;
    let kind = match topo.as_slice() {
        [k] => {
            TopologyKind::parse(k).ok_or_else(|| lines.err(format!("unknown topology `{k}`")))?
        }
        _ => return Err(lines.err("expected one topology value")),
    };
    let seed: u64 = match lines.header("seed")?.as_slice() {
        [s] => lines.number(s, "seed")?,
        _ => return Err(lines.err("expected one seed value")),
    };
    let devices: usize = match lines.header("devices")?.as_slice() {
        [s] => lines.number(s, "device count")?,
        _ => return Err(lines.err("expected one device count")),
    };
    let (pool, per_device): (u32, u32) = match lines.header("features")?.as_slice() {
        [p, k] => (
            lines.number(p, "feature pool")?,
            lines.number(k, "features per device")?,
        ),
        _ => return Err(lines.err("expected `features <pool> <per-device>`")),
    };

    let mut net = Network::new(kind, seed, devices);
    let mut profiles = Vec::with_capacity(devices);
    while profiles.len() < devices {
        let line = lines
            .next()?
            .ok_or_else(|| lines.err("missing node records"))?;
        let mut parts = line.split_whitespace();
        if parts.next() != Some("node") {
            return Err(lines.err("expected a node record"));
        }
        let id: u32 = lines.number(parts.next().unwrap_or(""), "node id")?;
        if id as usize != profiles.len() {
            return Err(lines.err(format!("node {id} out of order")));
        }
        let features = parts
            .map(|f| lines.number(f, "feature").map(FeatureId))
            .collect::<Result<Vec<_>, _>>()?;
        profiles.push(DeviceProfile::new(features));
    }
    let profile_line = lines.line;
    net.set_profiles(pool, per_device, profiles)
        .map_err(|source| NetFileError::Invariant {
            line: profile_line,
            source,
        })?;

    let mut in_social = false;
    let mut last: Option<(u32, u32)> = None;
    while let Some(line) = lines.next()? {
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let (tag, rest) = parts
            .split_first()
            .ok_or_else(|| lines.err("empty record"))?;
        let social = match *tag {
            "comm" if !in_social => false,
            "social" => true,
            "comm" => return Err(lines.err("comm record after social records")),
            other => return Err(lines.err(format!("unknown record `{other}`"))),
        };
        if social && !in_social {
            in_social = true;
            last = None;
        }
        let [u, v, value] = rest else {
            return Err(lines.err("expected `<u> <v> <value>`"));
        };
        let u: u32 = lines.number(u, "device id")?;
        let v: u32 = lines.number(v, "device id")?;
        if u >= v || last.is_some_and(|prev| prev >= (u, v)) {
            return Err(lines.err("edge records must be sorted with u < v"));
        }
        last = Some((u, v));
        let at = lines.line;
        let invariant = |source| NetFileError::Invariant { line: at, source };
        if social {
            let labels = value
                .split(',')
                .map(|l| {
                    RelationLabel::parse(l).ok_or_else(|| lines.err(format!("unknown label `{l}`")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            net.add_social_edge(DeviceId(u), DeviceId(v), &labels)
                .map_err(invariant)?;
        } else {
            let latency = parse_latency(value)
                .ok_or_else(|| lines.err(format!("invalid latency `{value}`")))?;
            net.add_comm_edge(DeviceId(u), DeviceId(v), latency)
                .map_err(invariant)?;
        }
    }
    Ok(net)
}

pub fn load_from_str(text: &str) -> Result<Network, NetFileError> {
    load_network(text.as_bytes())
}
