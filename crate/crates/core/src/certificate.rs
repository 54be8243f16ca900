//! Plain-text certificates for adequacy relations and search checkpoints.
//!
//! ```text
//! maxcomplex-certificate 1
//! order=product i=2 j=3 status=complete
//! map
//! 00 -> 00010001
//! 01 -> 00110011
//! ...
//! cover
//! 0001 <- 00/0
//! ...
//! end
//! ```
//!
//! Map lines give each source word and the truth table of its image in rank
//! order. Cover lines name, for every nonzero lower function, one source and
//! substituted value that reaches it. A partial certificate carries
//! `status=partial path=... nodes=...` and an empty map; feeding its path back
//! to the search resumes where it stopped. The empty source word is written `-`.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::lattice::{
    check_with, map_from_masks, substitute, AdequacyCertificate, Checked, Order, MAX_SOURCE_DIM,
};

const MAGIC: &str = "maxcomplex-certificate 1";
/// Largest target arity a certificate may name.
pub const MAX_CERT_ARITY: u32 = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Complete,
    Partial { path: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub order: Order,
    pub i: u32,
    pub j: u32,
    pub status: Status,
    pub nodes: Option<u64>,
    /// `(source rank, image mask)` in source order.
    pub map: Vec<(u64, u64)>,
    /// `(lower function, source rank, substituted value)` by lower function.
    pub cover: Vec<(u64, u64, u8)>,
}

impl Certificate {
    pub fn from_adequacy(cert: &AdequacyCertificate, nodes: Option<u64>) -> Self {
        let map: Vec<(u64, u64)> = cert
            .images()
            .into_iter()
            .enumerate()
            .map(|(s, m)| (s as u64, m))
            .collect();
        let mut first: BTreeMap<u64, (u64, u8)> = BTreeMap::new();
        for (s, pair) in cert.substitutions.iter().enumerate() {
            for (eps, &g) in pair.iter().enumerate() {
                if g != 0 {
                    first.entry(g).or_insert((s as u64, eps as u8));
                }
            }
        }
        Self {
            order: cert.order,
            i: cert.i,
            j: cert.j,
            status: Status::Complete,
            nodes,
            map,
            cover: first.into_iter().map(|(g, (s, e))| (g, s, e)).collect(),
        }
    }

    pub fn checkpoint(order: Order, i: u32, j: u32, path: Vec<usize>, nodes: u64) -> Self {
        Self {
            order,
            i,
            j,
            status: Status::Partial { path },
            nodes: Some(nodes),
            map: Vec::new(),
            cover: Vec::new(),
        }
    }

    pub fn is_complete(&self) -> bool {
        self.status == Status::Complete
    }

    /// Re-checks a complete certificate from scratch, including every cover line.
    pub fn verify(&self) -> Result<Checked> {
        if !self.is_complete() {
            return Err(Error::InvalidInput(
                "a partial certificate has no map to verify".into(),
            ));
        }
        let mut images = vec![None; 1usize << self.i];
        for &(s, m) in &self.map {
            let slot = images
                .get_mut(s as usize)
                .ok_or_else(|| Error::InvalidInput(format!("source {s} is outside the cube")))?;
            if slot.replace(m).is_some() {
                return Err(Error::InvalidInput(format!("source {s} is mapped twice")));
            }
        }
        let images: Vec<u64> = images
            .into_iter()
            .enumerate()
            .map(|(s, m)| m.ok_or_else(|| Error::InvalidInput(format!("source {s} has no image"))))
            .collect::<Result<_>>()?;
        let map = map_from_masks(self.order, self.i, self.j, &images)?;
        let checked = check_with(self.order, self.i, self.j, &map)?;
        if let Ok(cert) = &checked {
            for &(g, s, eps) in &self.cover {
                if substitute(images[s as usize], self.j, eps) != g {
                    return Err(Error::InvalidInput(format!(
                        "cover line for {g:#x} does not hold"
                    )));
                }
            }
            let listed: HashSet<u64> = self.cover.iter().map(|c| c.0).collect();
            if listed.len() != self.cover.len() || listed != cert.covered.iter().copied().collect()
            {
                return Err(Error::InvalidInput(
                    "cover section does not list each lower function once".into(),
                ));
            }
        }
        Ok(checked)
    }
}

fn source_text(s: u64, i: u32) -> String {
    if i == 0 {
        "-".to_string()
    } else {
        format!("{s:0width$b}", width = i as usize)
    }
}

fn table_text(m: u64, arity: u32) -> String {
    (0..1u32 << arity)
        .map(|r| if m >> r & 1 == 1 { '1' } else { '0' })
        .collect()
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{MAGIC}")?;
        write!(f, "order={} i={} j={}", self.order.name(), self.i, self.j)?;
        match &self.status {
            Status::Complete => write!(f, " status=complete")?,
            Status::Partial { path } => {
                let path: Vec<String> = path.iter().map(|k| k.to_string()).collect();
                write!(f, " status=partial path={}", path.join(","))?
            }
        }
        if let Some(n) = self.nodes {
            write!(f, " nodes={n}")?;
        }
        writeln!(f)?;
        writeln!(f, "map")?;
        for &(s, m) in &self.map {
            writeln!(f, "{} -> {}", source_text(s, self.i), table_text(m, self.j))?;
        }
        writeln!(f, "cover")?;
        for &(g, s, eps) in &self.cover {
            writeln!(
                f,
                "{} <- {}/{eps}",
                table_text(g, self.j - 1),
                source_text(s, self.i)
            )?;
        }
        writeln!(f, "end")
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_source(text: &str, i: u32, line: usize) -> Result<u64> {
    if i == 0 {
        return if text == "-" {
            Ok(0)
        } else {
            Err(parse_err(line, "the empty source word is written '-'"))
        };
    }
    if text.len() != i as usize || !text.bytes().all(|c| c == b'0' || c == b'1') {
        return Err(parse_err(line, format!("source must be {i} binary digits")));
    }
    u64::from_str_radix(text, 2).map_err(|e| parse_err(line, e.to_string()))
}

fn parse_table(text: &str, arity: u32, line: usize) -> Result<u64> {
    if text.len() != 1usize << arity {
        return Err(parse_err(
            line,
            format!("truth table must have {} digits", 1u32 << arity),
        ));
    }
    text.bytes()
        .enumerate()
        .try_fold(0u64, |m, (r, c)| match c {
            b'0' => Ok(m),
            b'1' => Ok(m | 1 << r),
            _ => Err(parse_err(line, "truth tables use only 0 and 1")),
        })
}

fn parse_u32(value: &str, key: &str, line: usize) -> Result<u32> {
    value
        .parse()
        .map_err(|_| parse_err(line, format!("{key} must be a small nonnegative integer")))
}

impl FromStr for Certificate {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l.trim_end()));
        match lines.next() {
            Some((_, MAGIC)) => {}
            Some((n, _)) => return Err(parse_err(n, format!("expected {MAGIC:?}"))),
            None => return Err(parse_err(1, "empty certificate")),
        }
        let (hn, header) = lines.next().ok_or_else(|| parse_err(2, "missing header"))?;
        let (mut order, mut i, mut j, mut status, mut path, mut nodes) =
            (None, None, None, None, None, None);
        for field in header.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| parse_err(hn, format!("bad field {field:?}")))?;
            let dup = match key {
                "order" => order
                    .replace(
                        value
                            .parse::<Order>()
                            .map_err(|e| parse_err(hn, e.to_string()))?,
                    )
                    .is_some(),
                "i" => i.replace(parse_u32(value, key, hn)?).is_some(),
                "j" => j.replace(parse_u32(value, key, hn)?).is_some(),
                "status" => status.replace(value.to_string()).is_some(),
                "path" => {
                    let p = if value.is_empty() {
                        Vec::new()
                    } else {
                        value
                            .split(',')
                            .map(|k| {
                                k.parse::<usize>()
                                    .map_err(|_| parse_err(hn, "path entries are integers"))
                            })
                            .collect::<Result<Vec<_>>>()?
                    };
                    path.replace(p).is_some()
                }
                "nodes" => nodes
                    .replace(
                        value
                            .parse::<u64>()
                            .map_err(|_| parse_err(hn, "bad node count"))?,
                    )
                    .is_some(),
                _ => return Err(parse_err(hn, format!("unknown field {key:?}"))),
            };
            if dup {
                return Err(parse_err(hn, format!("field {key:?} repeated")));
            }
        }
        let order = order.ok_or_else(|| parse_err(hn, "missing order"))?;
        let i = i.ok_or_else(|| parse_err(hn, "missing i"))?;
        let j = j.ok_or_else(|| parse_err(hn, "missing j"))?;
        if i > MAX_SOURCE_DIM || j == 0 || j > MAX_CERT_ARITY {
            return Err(parse_err(
                hn,
                format!("need i <= {MAX_SOURCE_DIM} and 1 <= j <= {MAX_CERT_ARITY}"),
            ));
        }
        let status = match (status.as_deref(), path) {
            (Some("complete"), None) => Status::Complete,
            (Some("complete"), Some(_)) => {
                return Err(parse_err(hn, "complete certificates carry no path"))
            }
            (Some("partial"), Some(path)) => Status::Partial { path },
            (Some("partial"), None) => {
                return Err(parse_err(hn, "partial certificates need a path"))
            }
            _ => return Err(parse_err(hn, "status must be complete or partial")),
        };
        let mut cert = Certificate {
            order,
            i,
            j,
            status,
            nodes,
            map: Vec::new(),
            cover: Vec::new(),
        };

        match lines.next() {
            Some((_, "map")) => {}
            Some((n, _)) => return Err(parse_err(n, "expected 'map'")),
            None => return Err(parse_err(hn + 1, "missing map section")),
        }
        let mut last = hn + 1;
        let mut section = "map";
        for (n, l) in lines.by_ref() {
            last = n;
            match (section, l) {
                (_, "end") => {
                    section = "end";
                    break;
                }
                ("map", "cover") => section = "cover",
                ("map", _) => {
                    let (s, m) = l
                        .split_once(" -> ")
                        .ok_or_else(|| parse_err(n, "expected 'source -> table'"))?;
                    cert.map
                        .push((parse_source(s, i, n)?, parse_table(m, j, n)?));
                }
                ("cover", _) => {
                    let (g, rest) = l
                        .split_once(" <- ")
                        .ok_or_else(|| parse_err(n, "expected 'table <- source/eps'"))?;
                    let (s, e) = rest
                        .split_once('/')
                        .ok_or_else(|| parse_err(n, "expected 'source/eps'"))?;
                    let eps = match e {
                        "0" => 0,
                        "1" => 1,
                        _ => return Err(parse_err(n, "substituted value must be 0 or 1")),
                    };
                    cert.cover
                        .push((parse_table(g, j - 1, n)?, parse_source(s, i, n)?, eps));
                }
                _ => unreachable!(),
            }
        }
        if section != "end" {
            return Err(parse_err(last + 1, "missing 'end'"));
        }
        if let Some((n, l)) = lines.find(|(_, l)| !l.trim().is_empty()) {
            return Err(parse_err(n, format!("text after 'end': {l:?}")));
        }
        if cert.map.len() > 1usize << i {
            return Err(parse_err(last, "more map lines than source elements"));
        }
        Ok(cert)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{check_relation, named_embedding, Embedding};
    use crate::RelationFailure;
    use proptest::prelude::*;

    fn post_alh() -> Certificate {
        let map = named_embedding(Embedding::PostAlh).unwrap();
        Certificate::from_adequacy(&check_relation(2, 3, &map).unwrap().unwrap(), Some(7))
    }

    #[test]
    fn round_trip_and_verify() {
        let cert = post_alh();
        let text = cert.to_string();
        assert!(text.starts_with(MAGIC));
        assert!(text.contains("order=product i=2 j=3 status=complete nodes=7"));
        assert_eq!(cert.cover.len(), 5);
        let back: Certificate = text.parse().unwrap();
        assert_eq!(back, cert);
        assert!(back.verify().unwrap().is_ok());
    }

    #[test]
    fn tampering_is_caught() {
        let mut cert = post_alh();
        cert.map[0].1 = cert.map[1].1;
        assert!(matches!(
            cert.verify().unwrap(),
            Err(RelationFailure::NotInjective { .. })
        ));

        let mut cert = post_alh();
        cert.cover[0].0 = cert.cover[1].0;
        assert!(cert.verify().is_err());

        let mut cert = post_alh();
        cert.map.pop();
        assert!(cert.verify().is_err());
    }

    #[test]
    fn checkpoints() {
        let cp = Certificate::checkpoint(Order::Majorization, 7, 4, vec![3, 0, 12], 99);
        let text = cp.to_string();
        assert!(text.contains("status=partial path=3,0,12 nodes=99"));
        assert_eq!(text.parse::<Certificate>().unwrap(), cp);
        assert!(cp.verify().is_err());
        let empty = Certificate::checkpoint(Order::Product, 0, 1, vec![], 0);
        assert_eq!(empty.to_string().parse::<Certificate>().unwrap(), empty);
    }

    #[test]
    fn parse_errors_name_lines() {
        let good = post_alh().to_string();
        let cases = [
            (good.replacen("maxcomplex", "minicomplex", 1), 1),
            (good.replace("order=product", "order=sideways"), 2),
            (good.replace("i=2", "i=2 i=2"), 2),
            (good.replace("status=complete", "status=complete path=1"), 2),
            (good.replace("j=3", "j=9"), 2),
            (good.replace("00 -> ", "0 -> "), 4),
            (good.replace("end\n", ""), 14),
        ];
        for (text, line) in cases {
            match text.parse::<Certificate>() {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{other:?} for {text}"),
            }
        }
        assert!("".parse::<Certificate>().is_err());
        assert!(format!("{good}trailing\n").parse::<Certificate>().is_err());
    }

    proptest! {
        #[test]
        fn arbitrary_text_never_panics(s in "\\PC{0,200}") {
            let _ = s.parse::<Certificate>();
        }

        #[test]
        fn printed_checkpoints_parse_back(
            i in 0u32..=10, j in 1u32..=5,
            path in proptest::collection::vec(0usize..1000, 0..20),
            nodes in any::<u64>(),
        ) {
            let cp = Certificate::checkpoint(Order::Product, i, j, path, nodes);
            prop_assert_eq!(cp.to_string().parse::<Certificate>().unwrap(), cp);
        }
    }
}
