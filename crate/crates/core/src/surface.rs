//! Elliptic surfaces y^2 = x^3 + A(t) x + B(t) over Q(t): j-invariant and
//! discriminant, pole data and special primes, per-place reduction types via
//! local minimalization, sections, and the pole-count bound decision.

use num::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::{poles, valuation, Place, Pole, RatFunc};

#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceModel {
    a: RatFunc,
    b: RatFunc,
    delta: RatFunc,
}

/// A section of the surface: the identity section or an affine point of the
/// generic fiber.
#[derive(Clone, Debug, PartialEq)]
pub enum Section {
    Identity,
    Affine { x: RatFunc, y: RatFunc },
}

impl Section {
    pub fn affine(x: RatFunc, y: RatFunc) -> Self {
        Section::Affine { x, y }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "reduction")]
pub enum ReductionType {
    Good,
    Multiplicative,
    Additive { potentially_multiplicative: bool },
}

impl SurfaceModel {
    /// Build the model, rejecting singular generic fibers (delta = 0).
    pub fn new(a: RatFunc, b: RatFunc) -> Result<Self> {
        let four = RatFunc::constant(BigRational::from_integer(4.into()));
        let twenty_seven = RatFunc::constant(BigRational::from_integer(27.into()));
        let minus_sixteen = RatFunc::constant(BigRational::from_integer((-16).into()));
        let disc_core = &(&four * &a.pow(3)) + &(&twenty_seven * &b.pow(2));
        if disc_core.is_zero() {
            return Err(Error::math(
                "singular model: discriminant -16(4A^3 + 27B^2) vanishes",
            ));
        }
        let delta = &minus_sixteen * &disc_core;
        Ok(SurfaceModel { a, b, delta })
    }

    pub fn a(&self) -> &RatFunc {
        &self.a
    }

    pub fn b(&self) -> &RatFunc {
        &self.b
    }

    pub fn delta(&self) -> &RatFunc {
        &self.delta
    }

    /// j = 6912 A^3 / (4 A^3 + 27 B^2); errors when constant (isotrivial).
    pub fn j_invariant(&self) -> Result<RatFunc> {
        let j = self.j_invariant_allow_constant()?;
        if j.is_constant() {
            return Err(Error::math(format!(
                "isotrivial surface: j-invariant is the constant {j}"
            )));
        }
        Ok(j)
    }

    /// The j-invariant without the non-constancy gate.
    pub fn j_invariant_allow_constant(&self) -> Result<RatFunc> {
        let four = RatFunc::constant(BigRational::from_integer(4.into()));
        let twenty_seven = RatFunc::constant(BigRational::from_integer(27.into()));
        let c = RatFunc::constant(BigRational::from_integer(6912.into()));
        let a3 = self.a.pow(3);
        let den = &(&four * &a3) + &(&twenty_seven * &self.b.pow(2));
        (&c * &a3).div(&den)
    }

    /// Special primes: 2 together with every odd prime dividing a pole order
    /// of j. Conjugate poles share their order, so Q-irreducible places carry
    /// all the information.
    pub fn special_primes(&self) -> Result<Vec<u64>> {
        let j = self.j_invariant()?;
        let mut out = vec![2u64];
        for pole in poles(&j)? {
            for (p, _) in crate::exactalg::intfactor::factor_u64(pole.order as u64) {
                if p > 2 && !out.contains(&p) {
                    out.push(p);
                }
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Classify reduction at a place after minimalizing the model there:
    /// scale (A, B) by pi^(-4k), pi^(-6k) with the largest k keeping both
    /// valuations non-negative, then read off the type from v(Delta_min) and
    /// v(A_min).
    pub fn reduction_type(&self, v: &Place) -> Result<ReductionType> {
        let va = if self.a.is_zero() {
            None
        } else {
            Some(valuation(&self.a, v)?)
        };
        let vb = if self.b.is_zero() {
            None
        } else {
            Some(valuation(&self.b, v)?)
        };
        let k = match (va, vb) {
            (Some(va), Some(vb)) => (va.div_euclid(4)).min(vb.div_euclid(6)),
            (Some(va), None) => va.div_euclid(4),
            (None, Some(vb)) => vb.div_euclid(6),
            (None, None) => unreachable!("delta nonzero forbids A = B = 0"),
        };
        let v_delta_min = valuation(&self.delta, v)? - 12 * k;
        let v_a_min = va.map(|x| x - 4 * k);
        debug_assert!(v_a_min.unwrap_or(0) >= 0);
        if v_delta_min == 0 {
            return Ok(ReductionType::Good);
        }
        if v_a_min == Some(0) {
            return Ok(ReductionType::Multiplicative);
        }
        let j = self.j_invariant_allow_constant()?;
        let potentially_multiplicative = if j.is_zero() {
            false
        } else {
            valuation(&j, v)? < 0
        };
        Ok(ReductionType::Additive {
            potentially_multiplicative,
        })
    }

    /// Places where bad reduction can occur: the zeros and poles of delta
    /// together with the poles of A and B, plus the place at infinity.
    pub fn candidate_bad_places(&self) -> Result<Vec<Place>> {
        let mut places: Vec<Place> = Vec::new();
        let push = |p: Place, places: &mut Vec<Place>| {
            if !places.contains(&p) {
                places.push(p);
            }
        };
        for poly in [
            self.delta.num(),
            self.delta.den(),
            self.a.den(),
            self.b.den(),
        ] {
            if poly.is_constant() {
                continue;
            }
            let (_, factors) = crate::exactalg::poly_factor(poly)?;
            for (pi, _) in factors {
                push(Place::finite_unchecked(pi), &mut places);
            }
        }
        push(Place::Infinity, &mut places);
        places.sort_by_key(|p| (p.degree(), p.to_string()));
        Ok(places)
    }

    /// Full analysis record for reports and the bound decision.
    pub fn analyze(&self) -> Result<SurfaceAnalysis> {
        let j = self.j_invariant()?;
        let pole_list = poles(&j)?;
        let special_primes = self.special_primes()?;
        let n_geometric_poles: u64 = pole_list.iter().map(|p| p.geometric_points as u64).sum();
        let mut fiber_types = Vec::new();
        for place in self.candidate_bad_places()? {
            let rt = self.reduction_type(&place)?;
            fiber_types.push((place, rt));
        }
        Ok(SurfaceAnalysis {
            j,
            delta: self.delta.clone(),
            pole_list,
            special_primes,
            fiber_types,
            n_geometric_poles,
        })
    }

    /// Does the section satisfy y^2 = x^3 + A x + B identically?
    pub fn check_section(&self, section: &Section) -> bool {
        match section {
            Section::Identity => true,
            Section::Affine { x, y } => {
                let lhs = y.pow(2);
                let rhs = &x.pow(3) + &(&(&self.a * x) + &self.b);
                lhs == rhs
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct SurfaceAnalysis {
    pub j: RatFunc,
    pub delta: RatFunc,
    pub pole_list: Vec<Pole>,
    pub special_primes: Vec<u64>,
    pub fiber_types: Vec<(Place, ReductionType)>,
    pub n_geometric_poles: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberTypeReport {
    pub place: String,
    #[serde(flatten)]
    pub reduction: ReductionType,
}

#[derive(Clone, Debug, Serialize)]
pub struct PoleReport {
    pub place: String,
    pub degree: usize,
    pub order: u32,
    pub geometric_poles: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SurfaceAnalysisReport {
    pub j: String,
    pub delta: String,
    pub poles: Vec<PoleReport>,
    pub special_primes: Vec<u64>,
    pub n_geometric_poles: u64,
    pub fiber_types: Vec<FiberTypeReport>,
}

impl SurfaceAnalysis {
    pub fn report(&self) -> SurfaceAnalysisReport {
        SurfaceAnalysisReport {
            j: self.j.to_string(),
            delta: self.delta.to_string(),
            poles: self
                .pole_list
                .iter()
                .map(|p| PoleReport {
                    place: p.place.to_string(),
                    degree: p.place.degree(),
                    order: p.order,
                    geometric_poles: p.geometric_points,
                })
                .collect(),
            special_primes: self.special_primes.clone(),
            n_geometric_poles: self.n_geometric_poles,
            fiber_types: self
                .fiber_types
                .iter()
                .map(|(place, rt)| FiberTypeReport {
                    place: place.to_string(),
                    reduction: *rt,
                })
                .collect(),
        }
    }
}

/// Outcome of the pole-count bound decision for a non-special prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum BoundDecision {
    NotApplicable,
    Bound { value: u64 },
}

/// The per-fiber bound on rational division hulls: l^2 in general, 0 with
/// enough geometric poles (or positive base genus); no claim for special
/// primes or sections already divisible by l.
pub fn decide_bound(
    analysis: &SurfaceAnalysis,
    ell: u64,
    p_is_ell_multiple: bool,
    base_genus: i64,
) -> BoundDecision {
    if analysis.special_primes.contains(&ell) || p_is_ell_multiple {
        return BoundDecision::NotApplicable;
    }
    let n = analysis.n_geometric_poles;
    if base_genus >= 1 || n >= 5 || (n >= 4 && ell >= 5) || (n >= 3 && ell >= 7) {
        BoundDecision::Bound { value: 0 }
    } else {
        BoundDecision::Bound { value: ell * ell }
    }
}

/// On-disk fixture: {"A": "...", "B": "...", "sections": [{"x","y"}], "t0": "..."}.
#[derive(Debug, Deserialize)]
pub struct SurfaceFixture {
    #[serde(rename = "A")]
    pub a: String,
    #[serde(rename = "B")]
    pub b: String,
    #[serde(default)]
    pub sections: Vec<SectionFixture>,
    #[serde(default)]
    pub t0: Option<String>,
    #[serde(default)]
    pub name: Option<String>,
}

#[derive(Debug, Deserialize)]
pub struct SectionFixture {
    pub x: String,
    pub y: String,
}

pub struct LoadedSurface {
    pub model: SurfaceModel,
    pub sections: Vec<Section>,
    pub t0: Option<BigRational>,
    pub name: Option<String>,
}

pub fn load_fixture_str(json: &str) -> Result<LoadedSurface> {
    let fixture: SurfaceFixture = serde_json::from_str(json)?;
    let a = RatFunc::parse(&fixture.a)?;
    let b = RatFunc::parse(&fixture.b)?;
    let model = SurfaceModel::new(a, b)?;
    let mut sections = Vec::new();
    for s in &fixture.sections {
        let section = Section::affine(RatFunc::parse(&s.x)?, RatFunc::parse(&s.y)?);
        if !model.check_section(&section) {
            return Err(Error::input(format!(
                "section (x, y) = ({}, {}) does not lie on the surface",
                s.x, s.y
            )));
        }
        sections.push(section);
    }
    let t0 = match &fixture.t0 {
        Some(s) => Some(crate::exactalg::parse_rational(s)?),
        None => None,
    };
    Ok(LoadedSurface {
        model,
        sections,
        t0,
        name: fixture.name,
    })
}

pub fn load_fixture(path: &std::path::Path) -> Result<LoadedSurface> {
    let text = std::fs::read_to_string(path)?;
    load_fixture_str(&text)
}

/// The running example surface y^2 = x^3 - t x + t with its section (1, 1).
pub fn fixture_t_cubic() -> (SurfaceModel, Section) {
    let a = RatFunc::parse("-t").unwrap();
    let b = RatFunc::parse("t").unwrap();
    let model = SurfaceModel::new(a, b).unwrap();
    let section = Section::affine(RatFunc::parse("1").unwrap(), RatFunc::parse("1").unwrap());
    debug_assert!(model.check_section(&section));
    (model, section)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::parse_poly;

    fn model(a: &str, b: &str) -> SurfaceModel {
        SurfaceModel::new(RatFunc::parse(a).unwrap(), RatFunc::parse(b).unwrap()).unwrap()
    }

    fn place(s: &str) -> Place {
        Place::finite(&parse_poly(s).unwrap()).unwrap()
    }

    #[test]
    fn j_of_fixture_surface() {
        let m = model("-t", "t");
        let j = m.j_invariant().unwrap();
        assert_eq!(j, RatFunc::parse("6912*t/(4*t-27)").unwrap());
        assert_eq!(j.to_string(), "6912*t/(4*t-27)");
        // delta = 16 t^2 (4t - 27)
        assert_eq!(m.delta(), &RatFunc::parse("16*t^2*(4*t-27)").unwrap());
    }

    #[test]
    fn isotrivial_rejected() {
        // y^2 = x^3 + x has constant j = 1728
        let m = model("1", "0");
        let j = m.j_invariant_allow_constant().unwrap();
        assert_eq!(j, RatFunc::parse("1728").unwrap());
        assert!(m.j_invariant().is_err());
        // A = 0 forces j = 0
        let m = model("0", "t");
        assert_eq!(m.j_invariant_allow_constant().unwrap(), RatFunc::zero());
        assert!(m.j_invariant().is_err());
    }

    #[test]
    fn singular_model_rejected() {
        // 4 A^3 + 27 B^2 = 0 at (A, B) = (-3, 2) scaled: A=-3t^2, B=2t^3
        assert!(SurfaceModel::new(
            RatFunc::parse("-3*t^2").unwrap(),
            RatFunc::parse("2*t^3").unwrap()
        )
        .is_err());
    }

    #[test]
    fn special_primes_of_fixture() {
        let m = model("-t", "t");
        assert_eq!(m.special_primes().unwrap(), vec![2]);
    }

    #[test]
    fn special_primes_from_pole_orders() {
        // y^2 = x^3 - 3x + (2 + t^6): 4A^3 + 27B^2 = 27 t^6 (4 + t^6), so
        // j = -6912/(t^6 (4 + t^6)) has a pole of order 6 at t = 0
        let m = model("-3", "2+t^6");
        let j = m.j_invariant().unwrap();
        let ps = poles(&j).unwrap();
        let at_zero = ps.iter().find(|p| p.place == place("t")).unwrap();
        assert_eq!(at_zero.order, 6);
        assert_eq!(m.special_primes().unwrap(), vec![2, 3]);

        // poles of orders 5 and 7: j = c/(t^5 (t-1)^7) via the same trick
        let m = model("-3", "2+t^5*(t-1)^7");
        assert_eq!(m.special_primes().unwrap(), vec![2, 5, 7]);
    }

    #[test]
    fn reduction_types_of_fixture() {
        let m = model("-t", "t");
        assert_eq!(
            m.reduction_type(&place("t-27/4")).unwrap(),
            ReductionType::Multiplicative
        );
        assert_eq!(
            m.reduction_type(&place("t")).unwrap(),
            ReductionType::Additive {
                potentially_multiplicative: false
            }
        );
        assert_eq!(
            m.reduction_type(&place("t-1")).unwrap(),
            ReductionType::Good
        );
    }

    #[test]
    fn multiplicative_delta_matches_j_pole() {
        // v(Delta_min) = -v(j) at multiplicative places
        let m = model("-t", "t");
        let v = place("t-27/4");
        let j = m.j_invariant().unwrap();
        assert_eq!(
            valuation(m.delta(), &v).unwrap(),
            -valuation(&j, &v).unwrap()
        );
    }

    #[test]
    fn minimalization_unwinds_twists() {
        // (A, B) = (t^4, t^6) minimalizes to (1, 1) at t: good reduction
        let m = model("t^4", "t^6");
        assert_eq!(m.reduction_type(&place("t")).unwrap(), ReductionType::Good);
    }

    #[test]
    fn section_check() {
        let m = model("-t", "t");
        let bad = Section::affine(RatFunc::parse("t").unwrap(), RatFunc::parse("t").unwrap());
        assert!(!m.check_section(&bad));
        let good = Section::affine(RatFunc::parse("1").unwrap(), RatFunc::parse("1").unwrap());
        assert!(m.check_section(&good));
        assert!(m.check_section(&Section::Identity));
    }

    #[test]
    fn analysis_of_fixture() {
        let (m, _) = fixture_t_cubic();
        let analysis = m.analyze().unwrap();
        assert_eq!(analysis.n_geometric_poles, 1);
        assert_eq!(analysis.special_primes, vec![2]);
        assert_eq!(analysis.pole_list.len(), 1);
        assert_eq!(analysis.pole_list[0].order, 1);
        // bad fibers at t = 0 (additive) and t = 27/4 (multiplicative)
        let types: Vec<String> = analysis
            .fiber_types
            .iter()
            .map(|(p, rt)| format!("{p}:{rt:?}"))
            .collect();
        assert!(types.iter().any(|s| s.starts_with("t:Additive")));
        assert!(types.iter().any(|s| s.contains("t-27/4:Multiplicative")));
    }

    #[test]
    fn decide_bound_rules() {
        let (m, _) = fixture_t_cubic();
        let analysis = m.analyze().unwrap();
        // N = 1 pole, l = 3 non-special: bound l^2 = 9
        assert_eq!(
            decide_bound(&analysis, 3, false, 0),
            BoundDecision::Bound { value: 9 }
        );
        // l = 2 special
        assert_eq!(
            decide_bound(&analysis, 2, false, 0),
            BoundDecision::NotApplicable
        );
        // section already divisible
        assert_eq!(
            decide_bound(&analysis, 3, true, 0),
            BoundDecision::NotApplicable
        );
        // genus >= 1 base forces 0
        assert_eq!(
            decide_bound(&analysis, 3, false, 1),
            BoundDecision::Bound { value: 0 }
        );
    }

    #[test]
    fn decide_bound_pole_thresholds() {
        let (m, _) = fixture_t_cubic();
        let mut analysis = m.analyze().unwrap();
        // synthetic pole counts exercise the thresholds
        analysis.n_geometric_poles = 5;
        assert_eq!(
            decide_bound(&analysis, 3, false, 0),
            BoundDecision::Bound { value: 0 }
        );
        analysis.n_geometric_poles = 4;
        assert_eq!(
            decide_bound(&analysis, 3, false, 0),
            BoundDecision::Bound { value: 9 }
        );
        assert_eq!(
            decide_bound(&analysis, 5, false, 0),
            BoundDecision::Bound { value: 0 }
        );
        analysis.n_geometric_poles = 3;
        assert_eq!(
            decide_bound(&analysis, 5, false, 0),
            BoundDecision::Bound { value: 25 }
        );
        assert_eq!(
            decide_bound(&analysis, 7, false, 0),
            BoundDecision::Bound { value: 0 }
        );
        // monotone: more poles never weakens the verdict
        let mut last_zero = false;
        for n in 1..=6 {
            analysis.n_geometric_poles = n;
            let zero = decide_bound(&analysis, 3, false, 0) == BoundDecision::Bound { value: 0 };
            assert!(!(last_zero && !zero), "bound must not revert at N={n}");
            last_zero = zero;
        }
    }

    #[test]
    fn fixture_loading() {
        let json = r#"{"A": "-t", "B": "t", "sections": [{"x": "1", "y": "1"}], "t0": "8"}"#;
        let loaded = load_fixture_str(json).unwrap();
        assert_eq!(loaded.sections.len(), 1);
        assert_eq!(loaded.t0, Some(BigRational::from_integer(8.into())));
        let bad = r#"{"A": "-t", "B": "t", "sections": [{"x": "t", "y": "t"}]}"#;
        assert!(load_fixture_str(bad).is_err());
    }

    #[test]
    fn good_places_with_finite_j_value() {
        // v(Delta) = 0 and finite j-value implies Good
        let m = model("-t", "t");
        for s in ["t-1", "t+1", "t-2", "t^2+1"] {
            assert_eq!(m.reduction_type(&place(s)).unwrap(), ReductionType::Good);
        }
        let one = BigRational::from_integer(1.into());
        assert!(m.j_invariant().unwrap().eval(&one).is_some());
    }
}
