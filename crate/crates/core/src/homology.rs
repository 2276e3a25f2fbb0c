//! First homology of reference fibres: integer classes, the intersection
//! pairing, Dehn twists and monodromy words.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Deserializes from a full description or from a built-in name such as
/// `"torus"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SurfaceRepr")]
pub struct SurfaceModel {
    pub name: String,
    pub basis: Vec<String>,
    /// Antisymmetric intersection matrix on the basis.
    pub pairing: Vec<Vec<i64>>,
    /// Named combinations such as `d = b + c`.
    pub aliases: Vec<(String, Vec<i64>)>,
}

#[derive(Deserialize)]
struct SurfaceFields {
    name: String,
    basis: Vec<String>,
    pairing: Vec<Vec<i64>>,
    #[serde(default)]
    aliases: Vec<(String, Vec<i64>)>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SurfaceRepr {
    Named(String),
    Full(SurfaceFields),
}

impl TryFrom<SurfaceRepr> for SurfaceModel {
    type Error = Error;

    fn try_from(r: SurfaceRepr) -> Result<SurfaceModel> {
        match r {
            SurfaceRepr::Named(n) => SurfaceModel::by_name(&n),
            SurfaceRepr::Full(f) => {
                let n = f.basis.len();
                if f.pairing.len() != n || f.pairing.iter().any(|row| row.len() != n) {
                    return Err(Error::Parse(format!(
                        "pairing of {} is not {n}x{n}",
                        f.name
                    )));
                }
                Ok(SurfaceModel {
                    name: f.name,
                    basis: f.basis,
                    pairing: f.pairing,
                    aliases: f.aliases,
                })
            }
        }
    }
}

impl SurfaceModel {
    /// Torus with `<a, b> = -1`.
    pub fn torus() -> SurfaceModel {
        SurfaceModel {
            name: "torus".into(),
            basis: vec!["a".into(), "b".into()],
            pairing: vec![vec![0, -1], vec![1, 0]],
            aliases: Vec::new(),
        }
    }

    /// Doubly punctured torus with generators a, b, c and `d = b + c`.
    pub fn torus2p() -> SurfaceModel {
        SurfaceModel::torus2p_with(-1)
    }

    /// The same surface with `<b, c>` set to `bc`.
    pub fn torus2p_with(bc: i64) -> SurfaceModel {
        SurfaceModel {
            name: "torus2p".into(),
            basis: vec!["a".into(), "b".into(), "c".into()],
            pairing: vec![vec![0, -1, 0], vec![1, 0, bc], vec![0, -bc, 0]],
            aliases: vec![("d".into(), vec![0, 1, 1])],
        }
    }

    pub fn by_name(name: &str) -> Result<SurfaceModel> {
        match name {
            "torus" => Ok(SurfaceModel::torus()),
            "torus2p" => Ok(SurfaceModel::torus2p()),
            other => Err(Error::UnknownId(other.to_string())),
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Class of a generator or alias.
    pub fn named(&self, name: &str) -> Result<CycleClass> {
        if let Some(i) = self.basis.iter().position(|b| b == name) {
            let mut v = vec![0; self.rank()];
            v[i] = 1;
            return Ok(CycleClass(v));
        }
        self.aliases
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| CycleClass(v.clone()))
            .ok_or_else(|| Error::UnknownId(name.to_string()))
    }

    /// Parse an integer combination such as `a-b`, `2b+d`, `-c`.
    pub fn parse_class(&self, src: &str) -> Result<CycleClass> {
        let s: String = src.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty cycle expression".into()));
        }
        let mut acc = vec![0i64; self.rank()];
        let bytes: Vec<char> = s.chars().collect();
        let mut i = 0;
        while i < bytes.len() {
            let mut sign = 1;
            if bytes[i] == '+' || bytes[i] == '-' {
                if bytes[i] == '-' {
                    sign = -1;
                }
                i += 1;
            } else if i > 0 {
                return Err(Error::Parse(format!("expected + or - in '{src}'")));
            }
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let coef: i64 = if i > start {
                bytes[start..i]
                    .iter()
                    .collect::<String>()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad coefficient in '{src}'")))?
            } else {
                1
            };
            if i < bytes.len() && bytes[i] == '*' {
                i += 1;
            }
            let nstart = i;
            while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                i += 1;
            }
            if i == nstart {
                return Err(Error::Parse(format!("missing generator in '{src}'")));
            }
            let name: String = bytes[nstart..i].iter().collect();
            let class = self.named(&name)?;
            for (a, v) in acc.iter_mut().zip(&class.0) {
                *a += sign * coef * v;
            }
        }
        Ok(CycleClass(acc))
    }

    pub fn format_class(&self, c: &CycleClass) -> String {
        let mut out = String::new();
        for (name, &v) in self.basis.iter().zip(&c.0) {
            if v == 0 {
                continue;
            }
            if v < 0 {
                out.push('-');
            } else if !out.is_empty() {
                out.push('+');
            }
            if v.abs() != 1 {
                out.push_str(&v.abs().to_string());
            }
            out.push_str(name);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }

    fn check(&self, c: &CycleClass) -> Result<()> {
        if c.0.len() != self.rank() {
            return Err(Error::DimensionMismatch(c.0.len(), self.rank()));
        }
        Ok(())
    }

    pub fn pairing(&self, u: &CycleClass, v: &CycleClass) -> Result<i64> {
        self.check(u)?;
        self.check(v)?;
        let mut acc = 0;
        for i in 0..self.rank() {
            for j in 0..self.rank() {
                acc += u.0[i] * self.pairing[i][j] * v.0[j];
            }
        }
        Ok(acc)
    }

    /// Right-handed twist along `c` (power +1) or its inverse (power -1).
    pub fn dehn_twist(&self, c: &CycleClass, x: &CycleClass, power: i32) -> Result<CycleClass> {
        let k = self.pairing(x, c)?;
        let sign = match power {
            1 => -1,
            -1 => 1,
            p => {
                return Err(Error::ParamOutOfRange {
                    name: "power".into(),
                    detail: format!("{p} is not +1 or -1"),
                })
            }
        };
        Ok(CycleClass(
            x.0.iter()
                .zip(&c.0)
                .map(|(a, b)| a + sign * k * b)
                .collect(),
        ))
    }

    /// Apply a word right to left, as in a composition of maps.
    pub fn apply_word(&self, word: &TwistWord, x: &CycleClass) -> Result<CycleClass> {
        if word.0.is_empty() {
            return Err(Error::Parse("empty twist word".into()));
        }
        let mut cur = x.clone();
        for (c, p) in word.0.iter().rev() {
            cur = self.dehn_twist(c, &cur, *p)?;
        }
        Ok(cur)
    }

    pub fn parse_word(&self, src: &str) -> Result<TwistWord> {
        let mut out = Vec::new();
        let mut rest = src.trim();
        while !rest.is_empty() {
            let (power, body) = if let Some(r) = rest.strip_prefix("Tinv(") {
                (-1, r)
            } else if let Some(r) = rest.strip_prefix("T(") {
                (1, r)
            } else {
                return Err(Error::Parse(format!("expected T( or Tinv( at '{rest}'")));
            };
            let close = body
                .find(')')
                .ok_or_else(|| Error::Parse("unclosed twist".into()))?;
            out.push((self.parse_class(&body[..close])?, power));
            rest = body[close + 1..].trim_start();
            if let Some(r) = rest.strip_prefix(',') {
                rest = r.trim_start();
                if rest.is_empty() {
                    return Err(Error::Parse("trailing comma".into()));
                }
            } else if !rest.is_empty() {
                return Err(Error::Parse(format!("expected ',' at '{rest}'")));
            }
        }
        if out.is_empty() {
            return Err(Error::Parse("empty twist word".into()));
        }
        Ok(TwistWord(out))
    }

    pub fn format_word(&self, w: &TwistWord) -> String {
        w.0.iter()
            .map(|(c, p)| {
                let head = if *p == 1 { "T" } else { "Tinv" };
                format!("{head}({})", self.format_class(c))
            })
            .collect::<Vec<_>>()
            .join(",")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CycleClass(pub Vec<i64>);

impl CycleClass {
    pub fn neg(&self) -> CycleClass {
        CycleClass(self.0.iter().map(|v| -v).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0)
    }
}

impl fmt::Display for CycleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Twists listed left to right, applied right to left.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TwistWord(pub Vec<(CycleClass, i32)>);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MonodromyParity {
    Even,
    Odd,
    Undetermined,
}

pub fn circle_parity_monodromy(
    surface: &SurfaceModel,
    word: &TwistWord,
    fold_cycle: &CycleClass,
) -> Result<MonodromyParity> {
    if fold_cycle.is_zero() {
        return Err(Error::ParamOutOfRange {
            name: "fold_cycle".into(),
            detail: "zero class".into(),
        });
    }
    let image = surface.apply_word(word, fold_cycle)?;
    Ok(if &image == fold_cycle {
        MonodromyParity::Even
    } else if image == fold_cycle.neg() {
        MonodromyParity::Odd
    } else {
        MonodromyParity::Undetermined
    })
}

/// Monodromy around the three Lefschetz points of a wrinkle.
pub const WRINKLE_MONODROMY: &str = "T(a+d),T(b-d),T(a-b)";
/// The same with the cyclic order of the vanishing cycles reversed.
pub const ACHIRAL_WRINKLE_MONODROMY: &str = "T(a+b),T(b+d),T(a-d)";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub statement: String,
    pub expected: String,
    pub actual: String,
    pub holds: bool,
}

/// The four twist identities of the reference fibres, evaluated on the
/// doubly punctured torus with `<b, c> = bc`.
pub fn reference_identities(bc: i64) -> Result<Vec<IdentityCheck>> {
    let s = SurfaceModel::torus2p_with(bc);
    let a = s.named("a")?;
    let mut out = Vec::new();
    let mut push = |statement: &str, word: &str, expected: &str| -> Result<()> {
        let w = s.parse_word(word)?;
        let e = s.parse_class(expected)?;
        let got = s.apply_word(&w, &a)?;
        out.push(IdentityCheck {
            statement: statement.into(),
            expected: s.format_class(&e),
            actual: s.format_class(&got),
            holds: got == e,
        });
        Ok(())
    };
    push("T(a-b) a = b", "T(a-b)", "b")?;
    push("Tinv(a+b) a = -b", "Tinv(a+b)", "-b")?;
    push("wrinkle monodromy a = -a", WRINKLE_MONODROMY, "-a")?;
    push(
        "achiral wrinkle monodromy a = a",
        ACHIRAL_WRINKLE_MONODROMY,
        "a",
    )?;
    Ok(out)
}

/// Signs of `<b, c>` in {+1, -1} for which every reference identity holds.
pub fn admissible_bc_signs() -> Result<Vec<i64>> {
    let mut out = Vec::new();
    for bc in [1, -1] {
        if reference_identities(bc)?.iter().all(|c| c.holds) {
            out.push(bc);
        }
    }
    Ok(out)
}

impl FromStr for SurfaceModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<SurfaceModel> {
        SurfaceModel::by_name(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s() -> SurfaceModel {
        SurfaceModel::torus2p()
    }

    fn c(src: &str) -> CycleClass {
        s().parse_class(src).unwrap()
    }

    #[test]
    fn pairing_table() {
        let s = s();
        assert_eq!(s.pairing(&c("a"), &c("b")).unwrap(), -1);
        assert_eq!(s.pairing(&c("a"), &c("a")).unwrap(), 0);
        assert_eq!(s.pairing(&c("b"), &c("c")).unwrap(), -1);
        assert_eq!(s.pairing(&c("a"), &c("d")).unwrap(), -1);
        assert!(matches!(
            s.pairing(&c("a"), &CycleClass(vec![1, 0])),
            Err(Error::DimensionMismatch(2, 3))
        ));
    }

    #[test]
    fn twists() {
        let s = s();
        assert_eq!(s.dehn_twist(&c("a-b"), &c("a"), 1).unwrap(), c("b"));
        assert_eq!(s.dehn_twist(&c("a+b"), &c("a"), -1).unwrap(), c("-b"));
        assert_eq!(s.dehn_twist(&c("c"), &c("c"), 1).unwrap(), c("c"));
        let t = SurfaceModel::torus();
        let a = t.named("a").unwrap();
        let amb = t.parse_class("a-b").unwrap();
        assert_eq!(t.dehn_twist(&amb, &a, 1).unwrap(), t.named("b").unwrap());
    }

    #[test]
    fn monodromy_parities() {
        let s = s();
        let a = c("a");
        let m1 = s.parse_word(WRINKLE_MONODROMY).unwrap();
        let m2 = s.parse_word(ACHIRAL_WRINKLE_MONODROMY).unwrap();
        assert_eq!(s.apply_word(&m1, &a).unwrap(), c("-a"));
        assert_eq!(s.apply_word(&m2, &a).unwrap(), a);
        assert_eq!(
            circle_parity_monodromy(&s, &m1, &a).unwrap(),
            MonodromyParity::Odd
        );
        assert_eq!(
            circle_parity_monodromy(&s, &m2, &a).unwrap(),
            MonodromyParity::Even
        );
        let tb = s.parse_word("T(b)").unwrap();
        assert_eq!(
            circle_parity_monodromy(&s, &tb, &a).unwrap(),
            MonodromyParity::Undetermined
        );
    }

    #[test]
    fn word_order_is_right_to_left() {
        let s = s();
        let w = s.parse_word("T(b),T(a)").unwrap();
        let manual = s
            .dehn_twist(&c("b"), &s.dehn_twist(&c("a"), &c("c+b"), 1).unwrap(), 1)
            .unwrap();
        assert_eq!(s.apply_word(&w, &c("c+b")).unwrap(), manual);
    }

    #[test]
    fn parse_errors_and_round_trip() {
        let s = s();
        assert!(s.parse_class("a+e").is_err());
        assert!(s.parse_class("").is_err());
        assert!(s.parse_word("T(a),").is_err());
        assert!(s.parse_word("S(a)").is_err());
        assert_eq!(c("2a-3*d"), CycleClass(vec![2, -3, -3]));
        let w = s.parse_word(WRINKLE_MONODROMY).unwrap();
        assert_eq!(s.format_word(&w), "T(a+b+c),T(-c),T(a-b)");
        assert_eq!(s.parse_word(&s.format_word(&w)).unwrap(), w);
    }

    #[test]
    fn unique_sign() {
        assert_eq!(admissible_bc_signs().unwrap(), vec![-1]);
    }
}
