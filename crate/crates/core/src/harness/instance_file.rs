//! Line-oriented instance files.
//!
//! ```text
//! maxcover-instance 1
//! # comments run to the end of a line
//! k 2
//! bias 0 0 0.1 0.1
//! seed 42
//! set explicit 1 2 3
//! set rectangle 2 0 0 2 3
//! ```
//!
//! A rectangle line gives the dimension, then the `lo` corner, then the
//! `hi` corner. `bias` and `seed` default to zero.

use std::fmt::Write as _;

use crate::backends::{explicit_backend, LatticePacking, LatticeRectangle, SkewedSampler};
use crate::error::{invalid, CoverError, ParseError, Result};
use crate::oracle::{
    make_handle, splitmix64, BackendKind, BiasProfile, CoverageInstance, Meter, SeedSequence, SetBackend,
};

pub const FORMAT_VERSION: u32 = 1;
const HEADER: &str = "maxcover-instance";
const MAX_DIM: usize = 64;

/// Stream tags under the instance seed.
const SIZE_STREAM: u64 = 0x5157;
const HASH_SALT: u64 = 0x4a5b;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetSpec {
    Explicit(Vec<u64>),
    Rectangle { lo: Vec<i64>, hi: Vec<i64> },
}

impl SetSpec {
    pub fn cardinality(&self) -> Result<u64> {
        match self {
            SetSpec::Explicit(v) => Ok(v.len() as u64),
            SetSpec::Rectangle { lo, hi } => crate::backends::rect_cardinality(lo, hi),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InstanceFile {
    pub k: usize,
    pub bias: BiasProfile,
    pub seed: u64,
    pub sets: Vec<SetSpec>,
}

fn tokens_to<T: std::str::FromStr>(line: usize, what: &str, toks: &[&str]) -> Result<Vec<T>, ParseError> {
    toks.iter()
        .map(|t| {
            t.parse()
                .map_err(|_| ParseError::new(line, format!("bad {what} `{t}`")))
        })
        .collect()
}

fn one<T: std::str::FromStr>(line: usize, key: &str, toks: &[&str]) -> Result<T, ParseError> {
    match toks {
        [v] => v
            .parse()
            .map_err(|_| ParseError::new(line, format!("bad value `{v}` for `{key}`"))),
        _ => Err(ParseError::new(line, format!("`{key}` takes exactly one value"))),
    }
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut header = false;
        let mut k: Option<usize> = None;
        let mut bias: Option<BiasProfile> = None;
        let mut seed: Option<u64> = None;
        let mut sets = Vec::new();
        let mut last = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            last = line;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let toks: Vec<&str> = content.split_whitespace().collect();
            if !header {
                match toks.as_slice() {
                    [HEADER, v] if *v == FORMAT_VERSION.to_string() => {
                        header = true;
                        continue;
                    }
                    [HEADER, v] => return Err(ParseError::new(line, format!("unsupported format version `{v}`"))),
                    _ => {
                        return Err(ParseError::new(
                            line,
                            format!("expected `{HEADER} {FORMAT_VERSION}` header"),
                        ))
                    }
                }
            }
            match toks[0] {
                "k" => {
                    if k.is_some() {
                        return Err(ParseError::new(line, "duplicate `k`"));
                    }
                    k = Some(one(line, "k", &toks[1..])?);
                }
                "seed" => {
                    if seed.is_some() {
                        return Err(ParseError::new(line, "duplicate `seed`"));
                    }
                    seed = Some(one(line, "seed", &toks[1..])?);
                }
                "bias" => {
                    if bias.is_some() {
                        return Err(ParseError::new(line, "duplicate `bias`"));
                    }
                    let v: Vec<f64> = tokens_to(line, "bias value", &toks[1..])?;
                    let [al, ar, dl, dr] = v[..] else {
                        return Err(ParseError::new(line, "`bias` takes four values"));
                    };
                    bias = Some(BiasProfile::new(al, ar, dl, dr).map_err(|e| ParseError::new(line, e.to_string()))?);
                }
                "set" => sets.push(Self::parse_set(line, &toks[1..])?),
                other => return Err(ParseError::new(line, format!("unknown directive `{other}`"))),
            }
        }
        if !header {
            return Err(ParseError::new(last.max(1), "missing header"));
        }
        let k = k.ok_or_else(|| ParseError::new(last, "missing `k`"))?;
        if k == 0 || k > sets.len() {
            return Err(ParseError::new(
                last,
                format!("need 1 <= k <= number of sets, got k = {k} with {} sets", sets.len()),
            ));
        }
        Ok(InstanceFile {
            k,
            bias: bias.unwrap_or_default(),
            seed: seed.unwrap_or(0),
            sets,
        })
    }

    fn parse_set(line: usize, toks: &[&str]) -> Result<SetSpec, ParseError> {
        match toks.first() {
            Some(&"explicit") => {
                let mut v: Vec<u64> = tokens_to(line, "element", &toks[1..])?;
                if v.is_empty() {
                    return Err(ParseError::new(line, "explicit set is empty"));
                }
                let listed = v.clone();
                v.sort_unstable();
                if let Some(p) = v.windows(2).find(|p| p[0] == p[1]) {
                    return Err(ParseError::new(line, format!("duplicate element {}", p[0])));
                }
                Ok(SetSpec::Explicit(listed))
            }
            Some(&"rectangle") => {
                let dim: usize = toks
                    .get(1)
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| ParseError::new(line, "rectangle needs a dimension"))?;
                if dim == 0 || dim > MAX_DIM {
                    return Err(ParseError::new(
                        line,
                        format!("dimension {dim} is outside 1..={MAX_DIM}"),
                    ));
                }
                if toks.len() != 2 + 2 * dim {
                    return Err(ParseError::new(
                        line,
                        format!("rectangle of dimension {dim} needs {} coordinates", 2 * dim),
                    ));
                }
                let coords: Vec<i64> = tokens_to(line, "coordinate", &toks[2..])?;
                let (lo, hi) = coords.split_at(dim);
                if let Some(j) = (0..dim).find(|&j| lo[j] > hi[j]) {
                    return Err(ParseError::new(line, format!("lo exceeds hi in coordinate {j}")));
                }
                crate::backends::rect_cardinality(lo, hi).map_err(|e| ParseError::new(line, e.to_string()))?;
                Ok(SetSpec::Rectangle {
                    lo: lo.to_vec(),
                    hi: hi.to_vec(),
                })
            }
            Some(other) => Err(ParseError::new(line, format!("unknown set kind `{other}`"))),
            None => Err(ParseError::new(line, "`set` needs a kind")),
        }
    }

    /// Parses raw bytes, which must be UTF-8.
    pub fn parse_bytes(data: &[u8]) -> Result<Self, ParseError> {
        let text = std::str::from_utf8(data).map_err(|e| ParseError::new(1, format!("not UTF-8: {e}")))?;
        InstanceFile::parse(text)
    }

    pub fn emit(&self) -> String {
        let mut out = String::new();
        let b = &self.bias;
        let _ = writeln!(out, "{HEADER} {FORMAT_VERSION}");
        let _ = writeln!(out, "k {}", self.k);
        let _ = writeln!(out, "bias {} {} {} {}", b.alpha_l, b.alpha_r, b.delta_l, b.delta_r);
        let _ = writeln!(out, "seed {}", self.seed);
        for s in &self.sets {
            match s {
                SetSpec::Explicit(v) => {
                    out.push_str("set explicit");
                    for x in v {
                        let _ = write!(out, " {x}");
                    }
                }
                SetSpec::Rectangle { lo, hi } => {
                    let _ = write!(out, "set rectangle {}", lo.len());
                    for c in lo.iter().chain(hi) {
                        let _ = write!(out, " {c}");
                    }
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn n(&self) -> usize {
        self.sets.len()
    }

    /// Total number of members over all sets, saturating.
    pub fn total_cardinality(&self) -> u64 {
        self.sets
            .iter()
            .map(|s| s.cardinality().unwrap_or(u64::MAX))
            .fold(0, u64::saturating_add)
    }

    /// The backend the sets should use when the caller has no preference.
    pub fn natural_backend(&self) -> BackendKind {
        match self.sets.first() {
            Some(SetSpec::Rectangle { .. }) => BackendKind::Rectangle,
            _ => BackendKind::Sorted,
        }
    }

    /// Builds the raw set representations. Rectangles share one packing.
    pub fn backends(&self, kind: BackendKind) -> Result<Vec<Box<dyn SetBackend>>> {
        let rect = kind == BackendKind::Rectangle;
        if let Some(i) = self
            .sets
            .iter()
            .position(|s| matches!(s, SetSpec::Rectangle { .. }) != rect)
        {
            return Err(CoverError::IncompatibleBackend(if rect {
                format!("set {i} is an explicit list but the backend is `rect`")
            } else {
                format!(
                    "set {i} is a rectangle and needs the `rect` backend, not `{}`",
                    kind.name()
                )
            }));
        }
        if rect {
            let boxes = self.sets.iter().filter_map(|s| match s {
                SetSpec::Rectangle { lo, hi } => Some((lo.as_slice(), hi.as_slice())),
                SetSpec::Explicit(_) => None,
            });
            let packing = LatticePacking::covering(boxes)?;
            self.sets
                .iter()
                .map(|s| match s {
                    SetSpec::Rectangle { lo, hi } => {
                        let r = LatticeRectangle::with_packing(lo.clone(), hi.clone(), packing.clone())?;
                        Ok(Box::new(r) as Box<dyn SetBackend>)
                    }
                    SetSpec::Explicit(_) => unreachable!("checked above"),
                })
                .collect()
        } else {
            let salt = splitmix64(self.seed ^ HASH_SALT);
            self.sets
                .iter()
                .enumerate()
                .map(|(i, s)| match s {
                    SetSpec::Explicit(v) => explicit_backend(kind, v, splitmix64(salt ^ i as u64)),
                    SetSpec::Rectangle { .. } => unreachable!("checked above"),
                })
                .collect()
        }
    }

    /// Builds the instance: backends of `kind`, wrapped in a skewed sampler
    /// when the bias profile asks for sampling bias, with reported sizes
    /// drawn from the file's seed.
    pub fn build(&self, kind: BackendKind) -> Result<CoverageInstance> {
        if self.k == 0 || self.k > self.sets.len() {
            return Err(invalid("k", "budget outside 1..=n"));
        }
        let mut backends = self.backends(kind)?;
        if self.bias.has_sampling_bias() {
            backends = backends
                .into_iter()
                .map(|b| {
                    SkewedSampler::new(b, self.bias.alpha_l, self.bias.alpha_r)
                        .map(|s| Box::new(s) as Box<dyn SetBackend>)
                })
                .collect::<Result<_>>()?;
        }
        let meter = Meter::new();
        let mut rng = SeedSequence::new(self.seed).stream(SIZE_STREAM);
        let handles = backends
            .into_iter()
            .enumerate()
            .map(|(i, b)| make_handle(i, b, &self.bias, meter.clone(), &mut rng))
            .collect();
        CoverageInstance::new(handles, self.k, self.bias, meter, false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::Element;
    use proptest::prelude::*;

    const SAMPLE: &str = "\
maxcover-instance 1
# three sets
k 2
bias 0 0 0.1 0.1
seed 42
set explicit 1 2 3
set explicit 3 4   # trailing comment
set explicit 6 5 4
";

    #[test]
    fn parses_the_sample() {
        let f = InstanceFile::parse(SAMPLE).unwrap();
        assert_eq!(f.k, 2);
        assert_eq!(f.seed, 42);
        assert_eq!(f.bias.delta_r, 0.1);
        assert_eq!(f.sets[2], SetSpec::Explicit(vec![6, 5, 4]));
        assert_eq!(InstanceFile::parse(&f.emit()).unwrap(), f);
    }

    #[test]
    fn rectangles_round_trip_and_build() {
        let text = "maxcover-instance 1\nk 1\nset rectangle 2 0 0 2 3\nset rectangle 2 -1 1 0 1\n";
        let f = InstanceFile::parse(text).unwrap();
        assert_eq!(f.bias, BiasProfile::zero());
        assert_eq!(InstanceFile::parse(&f.emit()).unwrap(), f);
        let inst = f.build(BackendKind::Rectangle).unwrap();
        assert_eq!(inst.handle(0).reported_size(), 12.0);
        assert_eq!(inst.handle(1).reported_size(), 2.0);
        assert!(f.build(BackendKind::Sorted).is_err());
    }

    #[test]
    fn explicit_sets_refuse_the_rect_backend() {
        let f = InstanceFile::parse(SAMPLE).unwrap();
        assert!(matches!(
            f.build(BackendKind::Rectangle),
            Err(CoverError::IncompatibleBackend(_))
        ));
        for kind in [
            BackendKind::Sorted,
            BackendKind::Unsorted,
            BackendKind::BTree,
            BackendKind::Hash,
        ] {
            let inst = f.build(kind).unwrap();
            assert_eq!(inst.materialize()[2], vec![Element(4), Element(5), Element(6)]);
        }
    }

    #[test]
    fn rejects_malformed_input() {
        let bad = [
            ("", 1),
            ("k 1\n", 1),
            ("maxcover-instance 2\n", 1),
            ("maxcover-instance 1\nk 1\n", 2),
            ("maxcover-instance 1\nk 2\nset explicit 1\n", 3),
            ("maxcover-instance 1\nk 1\nk 1\nset explicit 1\n", 3),
            ("maxcover-instance 1\nk 1\nset explicit 1 1\n", 3),
            ("maxcover-instance 1\nk 1\nset explicit\n", 3),
            ("maxcover-instance 1\nk 1\nset explicit -1\n", 3),
            ("maxcover-instance 1\nk 1\nset rectangle 2 0 0 1\n", 3),
            ("maxcover-instance 1\nk 1\nset rectangle 1 3 2\n", 3),
            ("maxcover-instance 1\nk 1\nset rectangle 99999999999999 0 0\n", 3),
            ("maxcover-instance 1\nk 1\nbias 0 0 1 0\nset explicit 1\n", 3),
            ("maxcover-instance 1\nk 1\nbias nan 0 0 0\nset explicit 1\n", 3),
            ("maxcover-instance 1\nk 1\nset cloud 1\n", 3),
            ("maxcover-instance 1\nfrobnicate\n", 2),
        ];
        for (text, line) in bad {
            let e = InstanceFile::parse(text).unwrap_err();
            assert_eq!(e.line, line, "{text:?}: {e}");
        }
        assert!(InstanceFile::parse_bytes(&[0xff, 0xfe]).is_err());
    }

    #[test]
    fn infeasible_skew_surfaces_at_build() {
        let text = "maxcover-instance 1\nk 1\nbias 0.5 0.1 0 0\nset explicit 1 2 3 4\n";
        let f = InstanceFile::parse(text).unwrap();
        assert!(matches!(
            f.build(BackendKind::Sorted),
            Err(CoverError::InfeasibleSkew { .. })
        ));
    }

    fn arb_set() -> impl Strategy<Value = SetSpec> {
        prop_oneof![
            proptest::collection::btree_set(any::<u64>(), 1..20)
                .prop_map(|s| SetSpec::Explicit(s.into_iter().collect())),
            (1usize..4).prop_flat_map(|d| {
                proptest::collection::vec((-1000i64..1000, 0i64..50), d).prop_map(|c| SetSpec::Rectangle {
                    lo: c.iter().map(|p| p.0).collect(),
                    hi: c.iter().map(|p| p.0 + p.1).collect(),
                })
            }),
        ]
    }

    proptest! {
        #[test]
        fn emit_then_parse_is_identity(
            sets in proptest::collection::vec(arb_set(), 1..8),
            k_frac in 0.0f64..1.0,
            seed in any::<u64>(),
            bias in (0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0),
        ) {
            let k = 1 + ((sets.len() - 1) as f64 * k_frac) as usize;
            let f = InstanceFile {
                k,
                bias: BiasProfile::new(bias.0, bias.1, bias.2, bias.3).unwrap(),
                seed,
                sets,
            };
            let text = f.emit();
            let back = InstanceFile::parse(&text).unwrap();
            prop_assert_eq!(&back, &f);
            prop_assert_eq!(back.emit(), text);
        }

        #[test]
        fn parse_never_panics(text in "(maxcover-instance 1\n)?([a-z0-9 #.\n-]{0,200})") {
            let _ = InstanceFile::parse(&text);
        }
    }
}
