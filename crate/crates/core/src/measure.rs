//! Normalised Borel measures evaluated on crescents.

use std::fmt;
use std::sync::Arc;

use crate::space::{BoxCell, Crescent, CylinderSet, Interval, SpaceDescriptor, Word};
use crate::sum::compensated;
use crate::{Error, Result};

type Cdf = dyn Fn(f64) -> f64 + Send + Sync;

/// A Stieltjes measure `(1 − Σ m_k)·dF + Σ m_k·δ_{x_k}` on `[0,1]` with a
/// continuous distribution function `F` and explicit atoms.
#[derive(Clone)]
pub struct Stieltjes {
    cdf: Arc<Cdf>,
    atoms: Vec<(f64, f64)>,
    continuous_mass: f64,
    label: String,
}

impl Stieltjes {
    /// Validates `F(0) = 0`, `F(1) = 1`, monotonicity of `F` on a 1024-step
    /// grid, atom locations in `[0,1]` and atom masses summing to at most 1.
    pub fn new(
        label: impl Into<String>,
        cdf: impl Fn(f64) -> f64 + Send + Sync + 'static,
        atoms: Vec<(f64, f64)>,
    ) -> Result<Stieltjes> {
        const GRID: usize = 1024;
        let f0 = cdf(0.0);
        let f1 = cdf(1.0);
        if f0.abs() > 1e-12 || (f1 - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidMeasure(format!(
                "cdf must satisfy F(0)=0 and F(1)=1, got F(0)={f0}, F(1)={f1}"
            )));
        }
        let mut prev = f0;
        for k in 1..=GRID {
            let t = k as f64 / GRID as f64;
            let v = cdf(t);
            if !v.is_finite() || v < prev {
                return Err(Error::InvalidMeasure(format!("cdf is not monotone near t={t}")));
            }
            prev = v;
        }
        let mut mass = 0.0;
        for &(x, m) in &atoms {
            if !(0.0..=1.0).contains(&x) || !(m >= 0.0) {
                return Err(Error::InvalidMeasure(format!("invalid atom ({x}, {m})")));
            }
            mass += m;
        }
        if mass > 1.0 + 1e-12 {
            return Err(Error::InvalidMeasure(format!("atom masses sum to {mass} > 1")));
        }
        Ok(Stieltjes {
            cdf: Arc::new(cdf),
            atoms,
            continuous_mass: (1.0 - mass).max(0.0),
            label: label.into(),
        })
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    fn of_interval(&self, c: &Interval) -> f64 {
        let c = c.intersect(&Interval::unit());
        if c.is_empty() {
            return 0.0;
        }
        let diffuse = self.continuous_mass * ((self.cdf)(c.hi) - (self.cdf)(c.lo)).max(0.0);
        let atoms: f64 = self
            .atoms
            .iter()
            .filter(|(x, _)| c.contains_point(*x))
            .map(|(_, m)| m)
            .sum();
        diffuse + atoms
    }
}

impl fmt::Debug for Stieltjes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Stieltjes")
            .field("cdf", &self.label)
            .field("atoms", &self.atoms)
            .finish()
    }
}

/// A normalised Borel measure on one of the backends.
#[derive(Debug, Clone)]
pub enum Measure {
    /// Lebesgue measure on `[0,1]`.
    Lebesgue,
    /// Lebesgue measure on a box, normalised by its volume.
    LebesgueBox { bounds: Vec<(f64, f64)> },
    Stieltjes(Stieltjes),
    /// Invariant measure of the binary Cantor IFS: `μ(B_w) = Π p_{w_i}`.
    CantorIfs { p0: f64 },
    /// Image of `CantorIfs { p0 }` under the coding map, on `[0,1]`.
    /// `depth` bounds the binary digits examined per endpoint.
    Pushforward { p0: f64, depth: u32 },
}

/// The value of a pushforward measure together with a flag telling whether
/// an endpoint needed truncation to `depth` binary digits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PushforwardValue {
    pub value: f64,
    pub approximated: bool,
}

impl Measure {
    pub const DEFAULT_PUSHFORWARD_DEPTH: u32 = 128;

    pub fn cantor_ifs(p0: f64) -> Result<Measure> {
        check_p0(p0)?;
        Ok(Measure::CantorIfs { p0 })
    }

    pub fn pushforward(p0: f64) -> Result<Measure> {
        check_p0(p0)?;
        Ok(Measure::Pushforward {
            p0,
            depth: Measure::DEFAULT_PUSHFORWARD_DEPTH,
        })
    }

    pub fn lebesgue_box(bounds: Vec<(f64, f64)>) -> Result<Measure> {
        let space = SpaceDescriptor::Box {
            bounds: bounds.clone(),
            basis: Default::default(),
        };
        space.validate().map_err(|e| Error::InvalidMeasure(e.to_string()))?;
        Ok(Measure::LebesgueBox { bounds })
    }

    pub fn space(&self) -> SpaceDescriptor {
        match self {
            Measure::LebesgueBox { bounds } => SpaceDescriptor::Box {
                bounds: bounds.clone(),
                basis: Default::default(),
            },
            Measure::CantorIfs { .. } => SpaceDescriptor::Cantor,
            _ => SpaceDescriptor::unit_interval(),
        }
    }

    pub fn whole_space(&self) -> Crescent {
        self.space().whole()
    }

    pub fn name(&self) -> String {
        match self {
            Measure::Lebesgue => "lebesgue".into(),
            Measure::LebesgueBox { bounds } => format!("lebesgue{bounds:?}"),
            Measure::Stieltjes(s) => format!("stieltjes({})", s.label),
            Measure::CantorIfs { p0 } => format!("cantor-ifs(p0={p0})"),
            Measure::Pushforward { p0, .. } => format!("pushforward(p0={p0})"),
        }
    }

    /// `μ(c)`.
    pub fn measure_of(&self, c: &Crescent) -> Result<f64> {
        match (self, c) {
            (Measure::Lebesgue, Crescent::Interval(i)) => Ok(i.intersect(&Interval::unit()).length()),
            (Measure::LebesgueBox { bounds }, Crescent::Box(b)) if b.dim() == bounds.len() => {
                let whole = BoxCell::closed(bounds);
                Ok(b.intersect(&whole).volume() / whole.volume())
            }
            (Measure::Stieltjes(s), Crescent::Interval(i)) => Ok(s.of_interval(i)),
            (Measure::CantorIfs { p0 }, Crescent::Cantor(set)) => Ok(cylinder_set_mass(*p0, set)),
            (Measure::Pushforward { .. }, Crescent::Interval(_)) => {
                Ok(self.pushforward_measure_of(c)?.value)
            }
            _ => Err(Error::SpaceMismatch(format!(
                "{} cannot measure a {} crescent",
                self.name(),
                c.kind()
            ))),
        }
    }

    /// `μ(∪ opens)`, computed by disjointifying the union.
    pub fn measure_of_open(&self, opens: &[Crescent]) -> Result<f64> {
        let mut parts = Vec::with_capacity(opens.len());
        for (k, o) in opens.iter().enumerate() {
            for piece in o.subtract_many(&opens[..k])? {
                parts.push(self.measure_of(&piece)?);
            }
        }
        Ok(compensated(parts))
    }

    /// `μ∘g^{-1}(c)` for an interval `c`, flagging truncated endpoints.
    pub fn pushforward_measure_of(&self, c: &Crescent) -> Result<PushforwardValue> {
        let (Measure::Pushforward { p0, depth }, Crescent::Interval(i)) = (self, c) else {
            return Err(Error::SpaceMismatch(format!(
                "pushforward_measure_of needs a pushforward measure and an interval, got {} and {}",
                self.name(),
                c.kind()
            )));
        };
        let i = i.intersect(&Interval::unit());
        if i.is_empty() {
            return Ok(PushforwardValue {
                value: 0.0,
                approximated: false,
            });
        }
        if *p0 == 0.0 || *p0 == 1.0 {
            let atom = if *p0 == 1.0 { 0.0 } else { 1.0 };
            return Ok(PushforwardValue {
                value: if i.contains_point(atom) { 1.0 } else { 0.0 },
                approximated: false,
            });
        }
        let (hi, ah) = pushforward_cdf(*p0, i.hi, *depth);
        let (lo, al) = pushforward_cdf(*p0, i.lo, *depth);
        Ok(PushforwardValue {
            value: (hi - lo).max(0.0),
            approximated: ah || al,
        })
    }
}

fn check_p0(p0: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p0) {
        Ok(())
    } else {
        Err(Error::InvalidMeasure(format!("p0 = {p0} is not in [0,1]")))
    }
}

/// `Π p_{w_i}` for one cylinder.
pub fn cylinder_mass(p0: f64, w: Word) -> f64 {
    let ones = w.bits.count_ones() as i32;
    let zeros = w.len() as i32 - ones;
    p0.powi(zeros) * (1.0 - p0).powi(ones)
}

fn cylinder_set_mass(p0: f64, set: &CylinderSet) -> f64 {
    compensated(set.words().iter().map(|&w| cylinder_mass(p0, w)))
}

/// Distribution function of the pushforward measure, read off the binary
/// expansion of `x`: each digit 1 at position `i` adds the mass of the
/// left sibling cylinder. Returns whether digits beyond `depth` were dropped.
fn pushforward_cdf(p0: f64, x: f64, depth: u32) -> (f64, bool) {
    if x >= 1.0 {
        return (1.0, false);
    }
    if x <= 0.0 {
        return (0.0, false);
    }
    let p1 = 1.0 - p0;
    let (mut acc, mut weight, mut frac) = (0.0, 1.0, x);
    for _ in 0..depth {
        if frac == 0.0 {
            return (acc, false);
        }
        frac *= 2.0;
        if frac >= 1.0 {
            frac -= 1.0;
            acc += weight * p0;
            weight *= p1;
        } else {
            weight *= p0;
        }
    }
    (acc, frac != 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(i: Interval) -> Crescent {
        Crescent::Interval(i)
    }

    #[test]
    fn measure_examples() {
        assert_eq!(
            Measure::Lebesgue
                .measure_of(&iv(Interval::closed_open(0.25, 0.75)))
                .unwrap(),
            0.5
        );
        let ifs = Measure::cantor_ifs(0.25).unwrap();
        assert_eq!(
            ifs.measure_of(&Crescent::cylinder(Word::parse("01").unwrap())).unwrap(),
            3.0 / 16.0
        );
        let s = Measure::Stieltjes(Stieltjes::new("t^2", |t| t * t, vec![]).unwrap());
        assert_eq!(s.measure_of(&iv(Interval::closed(0.0, 0.5))).unwrap(), 0.25);
    }

    #[test]
    fn open_union_examples() {
        let opens = [iv(Interval::open(0.0, 0.5)), iv(Interval::open(0.25, 0.75))];
        assert_eq!(Measure::Lebesgue.measure_of_open(&opens).unwrap(), 0.75);
        let ifs = Measure::cantor_ifs(0.5).unwrap();
        let cyl = |s: &str| Crescent::cylinder(Word::parse(s).unwrap());
        assert_eq!(ifs.measure_of_open(&[cyl("0"), cyl("01")]).unwrap(), 0.5);
        assert_eq!(Measure::Lebesgue.measure_of_open(&[]).unwrap(), 0.0);
    }

    #[test]
    fn pushforward_examples() {
        let half = Measure::pushforward(0.5).unwrap();
        let v = half
            .pushforward_measure_of(&iv(Interval::closed(0.25, 0.5)))
            .unwrap();
        assert_eq!(v, PushforwardValue { value: 0.25, approximated: false });
        let quarter = Measure::pushforward(0.25).unwrap();
        assert_eq!(quarter.measure_of(&iv(Interval::closed(0.5, 1.0))).unwrap(), 0.75);
        assert_eq!(quarter.measure_of(&iv(Interval::unit())).unwrap(), 1.0);
        let third = half
            .pushforward_measure_of(&iv(Interval::closed(0.0, 1.0 / 3.0)))
            .unwrap();
        assert!(!third.approximated);
        let shallow = Measure::Pushforward { p0: 0.5, depth: 8 };
        assert!(shallow
            .pushforward_measure_of(&iv(Interval::closed(0.0, 1.0 / 3.0)))
            .unwrap()
            .approximated);
    }

    #[test]
    fn stieltjes_atoms_respect_endpoint_flags() {
        let s = Stieltjes::new("t", |t| t, vec![(0.5, 0.25)]).unwrap();
        let m = Measure::Stieltjes(s);
        assert_eq!(m.measure_of(&iv(Interval::closed_open(0.0, 0.5))).unwrap(), 0.375);
        assert_eq!(m.measure_of(&iv(Interval::point(0.5))).unwrap(), 0.25);
        assert_eq!(m.measure_of(&iv(Interval::unit())).unwrap(), 1.0);
    }

    #[test]
    fn invalid_cdfs_are_rejected() {
        assert!(Stieltjes::new("bad", |t| if t < 0.5 { 1.5 * t } else { t }, vec![]).is_err());
        assert!(Stieltjes::new("sin", |t| (6.0 * t).sin() / 6f64.sin(), vec![]).is_err());
        assert!(Stieltjes::new("t", |t| t, vec![(0.2, 0.7), (0.4, 0.6)]).is_err());
        assert!(Measure::cantor_ifs(1.5).is_err());
    }
}
