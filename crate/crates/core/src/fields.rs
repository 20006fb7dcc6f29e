//! Scalar and vector fields used as integrands.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothness {
    Smooth,
    ContinuousOnly,
}

/// Truncated Weierstrass series `Σ_{k=0}^{terms} a^k cos(b^k π t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weierstrass {
    a: f64,
    b: u64,
    terms: u32,
}

impl Weierstrass {
    pub const DEFAULT: Weierstrass = Weierstrass { a: 0.5, b: 3, terms: 30 };

    /// `0 < a < 1`, `b` odd and at least 3, and `b^terms` finite.
    ///
    /// Past `b^k t ≥ 2^53` a term's phase is no longer resolved in `f64`;
    /// such terms carry weight at most `a^k`.
    pub fn new(a: f64, b: u64, terms: u32) -> Result<Self> {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::domain(format!("weierstrass needs 0 < a < 1, got {a}")));
        }
        if b < 3 || b % 2 == 0 {
            return Err(Error::domain(format!("weierstrass needs odd b >= 3, got {b}")));
        }
        if !(b as f64).powi(terms as i32).is_finite() {
            return Err(Error::domain(format!("b^K = {b}^{terms} overflows")));
        }
        Ok(Weierstrass { a, b, terms })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn terms(&self) -> u32 {
        self.terms
    }

    pub fn eval(&self, t: f64) -> f64 {
        let mut amp = 1.0;
        let mut freq = 1.0;
        let mut acc = 0.0;
        for _ in 0..=self.terms {
            // Reduce modulo 2 into [-1, 1]; the reduction is odd in t, which
            // keeps W exactly even.
            let x = freq * t;
            let phase = x - 2.0 * (0.5 * x).round();
            acc += amp * (PI * phase).cos();
            amp *= self.a;
            freq *= self.b as f64;
        }
        acc
    }

    /// Bound on `|W_∞(t) − W_K(t)|`: `a^{K+1} / (1 − a)`.
    pub fn truncation_bound(&self) -> f64 {
        self.a.powi(self.terms as i32 + 1) / (1.0 - self.a)
    }
}

pub fn weierstrass(a: f64, b: u64, terms: u32, t: f64) -> Result<f64> {
    Ok(Weierstrass::new(a, b, terms)?.eval(t))
}

type Eval2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
type Eval3 = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct ScalarField2 {
    name: String,
    smoothness: Smoothness,
    eval: Eval2,
}

impl ScalarField2 {
    pub fn new(
        name: impl Into<String>,
        smoothness: Smoothness,
        eval: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        ScalarField2 {
            name: name.into(),
            smoothness,
            eval: Arc::new(eval),
        }
    }

    pub fn constant(c: f64) -> Self {
        ScalarField2::new(format!("{c}"), Smoothness::Smooth, move |_, _| c)
    }

    #[inline]
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        (self.eval)(x, y)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }
}

impl fmt::Debug for ScalarField2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField2")
            .field("name", &self.name)
            .field("smoothness", &self.smoothness)
            .finish()
    }
}

/// Plane field `(P, Q)` with optional analytic `∂Q/∂x − ∂P/∂y`.
#[derive(Clone, Debug)]
pub struct VectorField2 {
    name: String,
    pub p: ScalarField2,
    pub q: ScalarField2,
    curlz: Option<ScalarField2>,
}

impl VectorField2 {
    pub fn new(
        name: impl Into<String>,
        p: ScalarField2,
        q: ScalarField2,
        curlz: Option<ScalarField2>,
    ) -> Result<Self> {
        let name = name.into();
        let smooth = p.smoothness() == Smoothness::Smooth && q.smoothness() == Smoothness::Smooth;
        if curlz.is_some() && !smooth {
            return Err(Error::validation(format!(
                "field `{name}` declares a curl but a component is continuous-only"
            )));
        }
        Ok(VectorField2 { name, p, q, curlz })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn eval(&self, x: f64, y: f64) -> (f64, f64) {
        (self.p.eval(x, y), self.q.eval(x, y))
    }

    pub fn curlz(&self) -> Option<&ScalarField2> {
        self.curlz.as_ref()
    }

    pub fn smoothness(&self) -> Smoothness {
        if self.p.smoothness() == Smoothness::Smooth && self.q.smoothness() == Smoothness::Smooth {
            Smoothness::Smooth
        } else {
            Smoothness::ContinuousOnly
        }
    }
}

/// Space field `(u, v, w)` with optional analytic divergence.
#[derive(Clone)]
pub struct VectorField3 {
    name: String,
    smoothness: Smoothness,
    components: [Eval3; 3],
    divergence: Option<Eval3>,
}

impl VectorField3 {
    pub fn new(
        name: impl Into<String>,
        smoothness: Smoothness,
        components: [Eval3; 3],
        divergence: Option<Eval3>,
    ) -> Result<Self> {
        let name = name.into();
        if divergence.is_some() && smoothness != Smoothness::Smooth {
            return Err(Error::validation(format!(
                "field `{name}` declares a divergence but is continuous-only"
            )));
        }
        Ok(VectorField3 {
            name,
            smoothness,
            components,
            divergence,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    #[inline]
    pub fn eval(&self, x: f64, y: f64, z: f64) -> [f64; 3] {
        [
            (self.components[0])(x, y, z),
            (self.components[1])(x, y, z),
            (self.components[2])(x, y, z),
        ]
    }

    /// Component along coordinate axis `axis` (0 = x, 1 = y, 2 = z).
    #[inline]
    pub fn component(&self, axis: usize, x: f64, y: f64, z: f64) -> f64 {
        (self.components[axis])(x, y, z)
    }

    pub fn divergence(&self, x: f64, y: f64, z: f64) -> Option<f64> {
        self.divergence.as_ref().map(|d| d(x, y, z))
    }

    pub fn has_divergence(&self) -> bool {
        self.divergence.is_some()
    }
}

impl fmt::Debug for VectorField3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VectorField3")
            .field("name", &self.name)
            .field("smoothness", &self.smoothness)
            .field("has_divergence", &self.divergence.is_some())
            .finish()
    }
}

/// `(c1, c2)`; curl 0.
pub fn const2(c1: f64, c2: f64) -> VectorField2 {
    VectorField2::new(
        "const2",
        ScalarField2::constant(c1),
        ScalarField2::constant(c2),
        Some(ScalarField2::constant(0.0)),
    )
    .expect("smooth")
}

/// `(−y/2, x/2)`; curl 1.
pub fn rot() -> VectorField2 {
    VectorField2::new(
        "rot",
        ScalarField2::new("-y/2", Smoothness::Smooth, |_, y| -0.5 * y),
        ScalarField2::new("x/2", Smoothness::Smooth, |x, _| 0.5 * x),
        Some(ScalarField2::constant(1.0)),
    )
    .expect("smooth")
}

/// Gradient of `x²y`: `(2xy, x²)`; curl 0.
pub fn grad() -> VectorField2 {
    VectorField2::new(
        "grad",
        ScalarField2::new("2xy", Smoothness::Smooth, |x, y| 2.0 * x * y),
        ScalarField2::new("x^2", Smoothness::Smooth, |x, _| x * x),
        Some(ScalarField2::constant(0.0)),
    )
    .expect("smooth")
}

/// `(W(y), W(x))` for a truncated Weierstrass series `W`; no declared curl.
pub fn weier(w: Weierstrass) -> VectorField2 {
    VectorField2::new(
        "weier",
        ScalarField2::new("W(y)", Smoothness::ContinuousOnly, move |_, y| w.eval(y)),
        ScalarField2::new("W(x)", Smoothness::ContinuousOnly, move |x, _| w.eval(x)),
        None,
    )
    .expect("no curl declared")
}

pub fn const3(c: [f64; 3]) -> VectorField3 {
    VectorField3::new(
        "const3",
        Smoothness::Smooth,
        [
            Arc::new(move |_, _, _| c[0]),
            Arc::new(move |_, _, _| c[1]),
            Arc::new(move |_, _, _| c[2]),
        ],
        Some(Arc::new(|_, _, _| 0.0)),
    )
    .expect("smooth")
}

/// `(x, y, z) / 3`; divergence 1.
pub fn radial() -> VectorField3 {
    VectorField3::new(
        "radial",
        Smoothness::Smooth,
        [
            Arc::new(|x, _, _| x / 3.0),
            Arc::new(|_, y, _| y / 3.0),
            Arc::new(|_, _, z| z / 3.0),
        ],
        Some(Arc::new(|_, _, _| 1.0)),
    )
    .expect("smooth")
}

/// `(W(y), W(z), z·(s + W(x)))` with `s = 1/(1−a)`: continuous, with a
/// Weierstrass profile in every component.
///
/// The first two components do not depend on the coordinate they point
/// along, and the profile `s + W(x)` is nonnegative, so the flux out of a
/// region grows with the region. Values on inner and outer figures then
/// bracket the flux through the surface.
pub fn weier3(w: Weierstrass) -> VectorField3 {
    let shift = 1.0 / (1.0 - w.a());
    VectorField3::new(
        "weier3",
        Smoothness::ContinuousOnly,
        [
            Arc::new(move |_, y, _| w.eval(y)),
            Arc::new(move |_, _, z| w.eval(z)),
            Arc::new(move |x, _, z| z * (shift + w.eval(x))),
        ],
        None,
    )
    .expect("no divergence declared")
}

/// Named catalog of fields.
#[derive(Debug, Clone)]
pub enum CatalogField {
    Plane(VectorField2),
    Space(VectorField3),
}

/// Every catalog entry with its default parameters.
pub fn catalog() -> Vec<(&'static str, CatalogField)> {
    vec![
        ("const2", CatalogField::Plane(const2(1.0, -2.0))),
        ("rot", CatalogField::Plane(rot())),
        ("grad", CatalogField::Plane(grad())),
        ("weier", CatalogField::Plane(weier(Weierstrass::DEFAULT))),
        ("const3", CatalogField::Space(const3([1.0, -2.0, 0.5]))),
        ("radial", CatalogField::Space(radial())),
        ("weier3", CatalogField::Space(weier3(Weierstrass::DEFAULT))),
    ]
}

/// Parse a field spec such as `rot`, `const2:c1=1,c2=-2` or
/// `weier:a=0.5,b=3,K=30`.
pub fn parse_field(spec: &str) -> Result<CatalogField> {
    let (name, params) = match spec.split_once(':') {
        Some((n, p)) => (n.trim(), p.trim()),
        None => (spec.trim(), ""),
    };
    let mut kv = Vec::new();
    for item in params.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::domain(format!("field parameter `{item}` is not key=value")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::domain(format!("field parameter `{item}` is not numeric")))?;
        kv.push((k.trim().to_string(), v));
    }
    let take = |key: &str, default: f64, kv: &mut Vec<(String, f64)>| -> f64 {
        match kv.iter().position(|(k, _)| k == key) {
            Some(p) => kv.remove(p).1,
            None => default,
        }
    };
    let weierstrass_params = |kv: &mut Vec<(String, f64)>| -> Result<Weierstrass> {
        let d = Weierstrass::DEFAULT;
        let a = take("a", d.a, kv);
        let b = take("b", d.b as f64, kv);
        let k = take("K", d.terms as f64, kv);
        if b.fract() != 0.0 || b < 0.0 || k.fract() != 0.0 || k < 0.0 {
            return Err(Error::domain("weierstrass b and K must be non-negative integers"));
        }
        Weierstrass::new(a, b as u64, k as u32)
    };
    let field = match name {
        "const2" => {
            let c1 = take("c1", 1.0, &mut kv);
            let c2 = take("c2", -2.0, &mut kv);
            CatalogField::Plane(const2(c1, c2))
        }
        "rot" => CatalogField::Plane(rot()),
        "grad" => CatalogField::Plane(grad()),
        "weier" => CatalogField::Plane(weier(weierstrass_params(&mut kv)?)),
        "const3" => {
            let c = [take("c1", 1.0, &mut kv), take("c2", -2.0, &mut kv), take("c3", 0.5, &mut kv)];
            CatalogField::Space(const3(c))
        }
        "radial" => CatalogField::Space(radial()),
        "weier3" => CatalogField::Space(weier3(weierstrass_params(&mut kv)?)),
        other => return Err(Error::domain(format!("unknown field `{other}`"))),
    };
    if let Some((k, _)) = kv.first() {
        return Err(Error::domain(format!("field `{name}` has no parameter `{k}`")));
    }
    Ok(field)
}
