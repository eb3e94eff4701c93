use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homalg::EMPTY_ID;
use crate::par::Exec;
use crate::rational::{format, is_integer, Rational};

use super::class::ClassLabel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OrbitKind {
    /// Rotation number θ, never an integer.
    Elliptic {
        #[serde(with = "crate::rational::serde_rational")]
        rotation: Rational,
    },
    PositiveHyperbolic { winding: i64 },
    NegativeHyperbolic { winding: i64 },
}

impl OrbitKind {
    pub fn is_hyperbolic(&self) -> bool {
        !matches!(self, OrbitKind::Elliptic { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            OrbitKind::Elliptic { .. } => "elliptic",
            OrbitKind::PositiveHyperbolic { .. } => "positive_hyperbolic",
            OrbitKind::NegativeHyperbolic { .. } => "negative_hyperbolic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Orbit {
    pub id: String,
    pub kind: OrbitKind,
    pub action: Rational,
    pub class: ClassLabel,
}

impl Orbit {
    pub fn new(id: impl Into<String>, kind: OrbitKind, action: Rational, class: ClassLabel) -> Result<Self> {
        let id = id.into();
        if id.is_empty() || id.contains(char::is_whitespace) || id.contains('^') || id == EMPTY_ID {
            return Err(Error::InvalidArgument(format!("orbit id {id:?} is not usable")));
        }
        if action <= Rational::from_integer(0) {
            return Err(Error::InvalidArgument(format!(
                "orbit {id} has non-positive action {}",
                format(&action)
            )));
        }
        match kind {
            OrbitKind::Elliptic { rotation } if is_integer(&rotation) => {
                return Err(Error::Degenerate(format!(
                    "elliptic orbit {id} has integer rotation {}",
                    format(&rotation)
                )))
            }
            OrbitKind::PositiveHyperbolic { winding } if winding % 2 != 0 => {
                return Err(Error::InvalidArgument(format!(
                    "positive hyperbolic orbit {id} needs even winding, got {winding}"
                )))
            }
            OrbitKind::NegativeHyperbolic { winding } if winding % 2 == 0 => {
                return Err(Error::InvalidArgument(format!(
                    "negative hyperbolic orbit {id} needs odd winding, got {winding}"
                )))
            }
            _ => {}
        }
        Ok(Self { id, kind, action, class })
    }

    pub fn elliptic(id: &str, rotation: Rational, action: Rational) -> Result<Self> {
        Self::new(id, OrbitKind::Elliptic { rotation }, action, ClassLabel::zero())
    }

    pub fn hyperbolic(id: &str, winding: i64, action: Rational) -> Result<Self> {
        let kind = if winding % 2 == 0 {
            OrbitKind::PositiveHyperbolic { winding }
        } else {
            OrbitKind::NegativeHyperbolic { winding }
        };
        Self::new(id, kind, action, ClassLabel::zero())
    }
}

/// An admissible orbit set: distinct orbits with positive multiplicities,
/// hyperbolic ones at most once.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrbitSet {
    pairs: Vec<(Orbit, u32)>,
}

impl OrbitSet {
    pub fn empty() -> Self {
        Self { pairs: Vec::new() }
    }

    pub fn new(pairs: Vec<(Orbit, u32)>) -> Result<Self> {
        for (i, (o, m)) in pairs.iter().enumerate() {
            if *m == 0 {
                return Err(Error::InvalidArgument(format!("orbit {} has multiplicity 0", o.id)));
            }
            if o.kind.is_hyperbolic() && *m > 1 {
                return Err(Error::InvalidArgument(format!(
                    "hyperbolic orbit {} appears with multiplicity {m}",
                    o.id
                )));
            }
            if pairs[..i].iter().any(|(p, _)| p.id == o.id) {
                return Err(Error::InvalidArgument(format!("orbit {} repeated", o.id)));
            }
        }
        Ok(Self { pairs })
    }

    pub fn pairs(&self) -> &[(Orbit, u32)] {
        &self.pairs
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn multiplicity(&self, orbit_id: &str) -> u32 {
        self.pairs.iter().find(|(o, _)| o.id == orbit_id).map_or(0, |(_, m)| *m)
    }

    pub fn action(&self) -> Rational {
        action(self)
    }

    pub fn class(&self) -> Result<ClassLabel> {
        self.pairs
            .iter()
            .try_fold(ClassLabel::zero(), |acc, (o, m)| acc.checked_add(&o.class.times(*m as u64)))
    }

    /// `γ₁^2 γ₂`-style id; `∅` for the empty set.
    pub fn id(&self) -> String {
        if self.pairs.is_empty() {
            return EMPTY_ID.to_string();
        }
        self.pairs
            .iter()
            .map(|(o, m)| if *m == 1 { o.id.clone() } else { format!("{}^{m}", o.id) })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for OrbitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

/// Total action `Σ mᵢ 𝒜(αᵢ)`.
pub fn action(s: &OrbitSet) -> Rational {
    s.pairs
        .iter()
        .fold(Rational::from_integer(0), |acc, (o, m)| acc + o.action * Rational::from_integer(*m as i128))
}

/// All admissible orbit sets of action below `l` (in class `gamma` if
/// given), sorted by (action, id). A set of action exactly `l` is an error.
pub fn enumerate_orbit_sets(orbits: &[Orbit], l: Rational, gamma: Option<&ClassLabel>) -> Result<Vec<OrbitSet>> {
    enumerate_orbit_sets_with(orbits, l, gamma, Exec::default())
}

/// As [`enumerate_orbit_sets`], but `l` is a plain exclusive bound: sets of
/// action exactly `l` are left out instead of rejected.
pub fn enumerate_orbit_sets_below(orbits: &[Orbit], l: Rational, gamma: Option<&ClassLabel>) -> Result<Vec<OrbitSet>> {
    enumerate(orbits, l, gamma, Exec::default(), false)
}

pub fn enumerate_orbit_sets_with(
    orbits: &[Orbit],
    l: Rational,
    gamma: Option<&ClassLabel>,
    exec: Exec,
) -> Result<Vec<OrbitSet>> {
    enumerate(orbits, l, gamma, exec, true)
}

fn enumerate(
    orbits: &[Orbit],
    l: Rational,
    gamma: Option<&ClassLabel>,
    exec: Exec,
    reject_ties: bool,
) -> Result<Vec<OrbitSet>> {
    for (i, o) in orbits.iter().enumerate() {
        if orbits[..i].iter().any(|p| p.id == o.id) {
            return Err(Error::InvalidArgument(format!("orbit {} listed twice", o.id)));
        }
    }
    let cap = |o: &Orbit| -> u32 {
        if o.kind.is_hyperbolic() {
            1
        } else {
            // m·𝒜 ≤ L, so m ≤ ⌊L/𝒜⌋.
            (l / o.action).floor().to_integer().max(0) as u32
        }
    };
    let Some(first) = orbits.first() else {
        return finish(vec![(Vec::new(), Rational::from_integer(0))], l, gamma, orbits, reject_ties);
    };
    let firsts: Vec<u32> = (0..=cap(first)).collect();
    let branches = exec.map(&firsts, |&m0| {
        let mut out = Vec::new();
        let mut mults = vec![0u32; orbits.len()];
        mults[0] = m0;
        let a0 = first.action * Rational::from_integer(m0 as i128);
        if a0 <= l {
            extend(orbits, 1, &mut mults, a0, l, &cap, &mut out);
        }
        out
    });
    finish(branches.into_iter().flatten().collect(), l, gamma, orbits, reject_ties)
}

fn extend<F: Fn(&Orbit) -> u32>(
    orbits: &[Orbit],
    i: usize,
    mults: &mut Vec<u32>,
    acc: Rational,
    l: Rational,
    cap: &F,
    out: &mut Vec<(Vec<u32>, Rational)>,
) {
    if i == orbits.len() {
        out.push((mults.clone(), acc));
        return;
    }
    for m in 0..=cap(&orbits[i]) {
        let a = acc + orbits[i].action * Rational::from_integer(m as i128);
        if a > l {
            break;
        }
        mults[i] = m;
        extend(orbits, i + 1, mults, a, l, cap, out);
    }
    mults[i] = 0;
}

fn finish(
    raw: Vec<(Vec<u32>, Rational)>,
    l: Rational,
    gamma: Option<&ClassLabel>,
    orbits: &[Orbit],
    reject_ties: bool,
) -> Result<Vec<OrbitSet>> {
    let mut sets = Vec::with_capacity(raw.len());
    for (mults, a) in raw {
        let set = OrbitSet {
            pairs: orbits
                .iter()
                .zip(&mults)
                .filter(|(_, &m)| m > 0)
                .map(|(o, &m)| (o.clone(), m))
                .collect(),
        };
        if a == l {
            if reject_ties {
                return Err(Error::LDegenerate { id: set.id(), threshold: l });
            }
            continue;
        }
        if let Some(g) = gamma {
            if &set.class()? != g {
                continue;
            }
        }
        sets.push((a, set.id(), set));
    }
    sets.sort_by(|x, y| (x.0, &x.1).cmp(&(y.0, &y.1)));
    Ok(sets.into_iter().map(|(_, _, s)| s).collect())
}

/// Consecutive sets of equal action in a sorted enumeration.
pub fn action_ties(sets: &[OrbitSet]) -> Vec<(String, String, Rational)> {
    sets.windows(2)
        .filter(|w| w[0].action() == w[1].action())
        .map(|w| (w[0].id(), w[1].id(), w[0].action()))
        .collect()
}
