//! Zeta-function sources for the root finder.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::representations::UnitaryRep;
use crate::scheme::SchottkyScheme;
use crate::thermo::cover::DiskCover;
use crate::transfer::assemble::{assemble, AssemblyOptions};
use crate::transfer::det::fredholm_det;
use crate::transfer::euler::PrimeOrbits;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZetaValue {
    /// A logarithm of the value; only `Im` modulo `2π` is meaningful.
    pub log: Complex64,
    /// `d/ds log`, when the source provides it; used to unwrap fast phase rotation.
    pub dlog: Option<Complex64>,
    /// Scale-free `ln|·|` used to detect zeros on contours.
    pub proximity: f64,
    pub precision_warning: bool,
}

impl ZetaValue {
    pub fn arg(&self) -> f64 {
        Complex64::from_polar(1.0, self.log.im).arg()
    }
}

/// Anything whose zeros are counted: `s ↦ det(I − 𝓛_{s,ϱ})` or an equivalent product.
pub trait ZetaFunction: Sync {
    fn eval(&self, s: Complex64) -> Result<ZetaValue>;
    /// Dimension of the twist (covering degree for permutation twists).
    fn degree(&self) -> usize;
    fn describe(&self) -> String;
}

/// Fredholm determinant of the assembled transfer matrix.
pub struct TransferZeta {
    pub scheme: SchottkyScheme<f64>,
    pub cover: DiskCover,
    pub rep: UnitaryRep,
    pub opts: AssemblyOptions,
}

impl TransferZeta {
    pub fn new(scheme: SchottkyScheme<f64>, rep: UnitaryRep, q: usize, level: usize) -> Result<Self> {
        let cover = DiskCover::refine(&scheme, level)?;
        Ok(TransferZeta {
            scheme,
            cover,
            rep,
            opts: AssemblyOptions::with_q(q),
        })
    }
}

impl ZetaFunction for TransferZeta {
    fn eval(&self, s: Complex64) -> Result<ZetaValue> {
        let d = fredholm_det(&assemble(&self.scheme, &self.cover, &self.rep, s, &self.opts)?);
        Ok(ZetaValue {
            log: d.log(),
            dlog: None,
            proximity: d.ln_abs,
            precision_warning: d.precision_warning,
        })
    }

    fn degree(&self) -> usize {
        self.rep.dim()
    }

    fn describe(&self) -> String {
        format!("transfer(Q={}, level={})", self.opts.q, self.cover.level())
    }
}

/// Euler product over prime orbits. Exact and entire for rank-one schemes, where the
/// class list is finite, so it reaches `Re s ≪ 0` where matrix determinants lose all digits.
pub struct EulerZeta {
    pub orbits: PrimeOrbits,
    pub dim: usize,
}

impl EulerZeta {
    pub fn new(scheme: &SchottkyScheme<f64>, rep: &UnitaryRep, word_cutoff: usize) -> Result<Self> {
        Ok(EulerZeta {
            orbits: PrimeOrbits::enumerate(scheme, rep, word_cutoff)?,
            dim: rep.dim(),
        })
    }
}

impl ZetaFunction for EulerZeta {
    fn eval(&self, s: Complex64) -> Result<ZetaValue> {
        let v = self.orbits.eval(s, None);
        Ok(ZetaValue {
            log: v.log,
            dlog: Some(v.dlog),
            proximity: v.normalized_ln_abs,
            precision_warning: false,
        })
    }

    fn degree(&self) -> usize {
        self.dim
    }

    fn describe(&self) -> String {
        format!("euler(cutoff={}, complete={})", self.orbits.cutoff, self.orbits.is_complete())
    }
}

/// Which evaluator backs the root finder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZetaMethod {
    /// Euler product when the scheme has rank one, transfer matrices otherwise.
    Auto,
    Transfer,
    Euler,
}

pub fn zeta_source(
    scheme: &SchottkyScheme<f64>,
    rep: &UnitaryRep,
    method: ZetaMethod,
    q: usize,
    level: usize,
    word_cutoff: usize,
) -> Result<Box<dyn ZetaFunction>> {
    let euler = match method {
        ZetaMethod::Auto => scheme.rank() == 1,
        ZetaMethod::Euler => true,
        ZetaMethod::Transfer => false,
    };
    Ok(if euler {
        Box::new(EulerZeta::new(scheme, rep, word_cutoff)?)
    } else {
        Box::new(TransferZeta::new(scheme.clone(), rep.clone(), q, level)?)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::cylinder_scheme;

    #[test]
    fn euler_and_transfer_agree_on_the_cylinder() {
        let sch = cylinder_scheme(2.0).unwrap();
        let rep = UnitaryRep::trivial(1, 1);
        let t = TransferZeta::new(sch.clone(), rep.clone(), 40, 0).unwrap();
        let e = EulerZeta::new(&sch, &rep, 1).unwrap();
        for s in [Complex64::new(0.5, 3.0), Complex64::new(-2.2, 7.5), Complex64::new(1.0, -10.0)] {
            let a = t.eval(s).unwrap().log.exp();
            let b = e.eval(s).unwrap().log.exp();
            assert!((a - b).norm() < 1e-9 * b.norm().max(1.0), "{s} {a} {b}");
        }
    }
}
