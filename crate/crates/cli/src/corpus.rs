//! Seeded random generators used by the suites.

use std::f64::consts::{PI, TAU};

use hoferlike::isotopy::GeneratorPath;
use hoferlike::{HarmonicForm, Result, ScalarField, TorusGrid};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// `(1 + ramp t) (cos * cos 2 pi k.x + sin * sin 2 pi k.x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Term {
    pub kx: i32,
    pub ky: i32,
    pub cos: f64,
    pub sin: f64,
    pub ramp: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Hamiltonian,
    Harmonic,
    Mixed,
}

/// Generator `U_t = sum of terms`, `H_t = h0 + sin(pi t) h1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenSpec {
    pub id: String,
    pub kind: Kind,
    pub terms: Vec<Term>,
    pub h0: [f64; 2],
    pub h1: [f64; 2],
}

impl GenSpec {
    pub fn h_at(&self, t: f64) -> HarmonicForm {
        let s = (PI * t).sin();
        HarmonicForm::new(self.h0[0] + s * self.h1[0], self.h0[1] + s * self.h1[1])
    }

    pub fn build(&self, grid: TorusGrid, samples: usize) -> Result<GeneratorPath> {
        let basis: Vec<(Vec<f64>, Vec<f64>)> = self
            .terms
            .iter()
            .map(|term| {
                let (kx, ky) = (term.kx as f64, term.ky as f64);
                (0..grid.len())
                    .map(|idx| {
                        let (x, y) = grid.coords(idx);
                        let ph = TAU * (kx * x + ky * y);
                        (ph.cos(), ph.sin())
                    })
                    .unzip()
            })
            .collect();
        GeneratorPath::from_fn(grid, samples, |t| {
            let mut values = vec![0.0; grid.len()];
            for (term, (c, s)) in self.terms.iter().zip(&basis) {
                let w = 1.0 + term.ramp * t;
                let (a, b) = (w * term.cos, w * term.sin);
                for (v, (ci, si)) in values.iter_mut().zip(c.iter().zip(s)) {
                    *v += a * ci + b * si;
                }
            }
            (ScalarField { grid, values }, self.h_at(t))
        })
    }

    /// Bound on `|grad U_t|` over the unit time interval.
    fn speed_bound(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                TAU * (t.kx as f64).hypot(t.ky as f64)
                    * (t.cos.abs() + t.sin.abs())
                    * (1.0 + t.ramp.abs())
            })
            .sum()
    }
}

fn wavevector(rng: &mut ChaCha8Rng) -> (i32, i32) {
    loop {
        let k = (rng.gen_range(-2..=2), rng.gen_range(-2..=2));
        if k != (0, 0) {
            return k;
        }
    }
}

/// Random generator whose exact part moves points at speed at most
/// `vmax` and whose harmonic part has norm below about one.
pub fn random_spec(rng: &mut ChaCha8Rng, id: String, kind: Kind, vmax: f64) -> GenSpec {
    let mut spec = GenSpec {
        id,
        kind,
        terms: Vec::new(),
        h0: [0.0; 2],
        h1: [0.0; 2],
    };
    if kind != Kind::Harmonic {
        let count = rng.gen_range(1..=3);
        for _ in 0..count {
            let (kx, ky) = wavevector(rng);
            spec.terms.push(Term {
                kx,
                ky,
                cos: rng.gen_range(-0.1..0.1),
                sin: rng.gen_range(-0.1..0.1),
                ramp: rng.gen_range(-0.5..1.0),
            });
        }
        let bound = spec.speed_bound();
        if bound > vmax {
            for t in &mut spec.terms {
                t.cos *= vmax / bound;
                t.sin *= vmax / bound;
            }
        }
    }
    if kind != Kind::Hamiltonian {
        spec.h0 = [rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6)];
        spec.h1 = [rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)];
    }
    spec
}

/// `count` specs cycling through Hamiltonian, harmonic and mixed.
pub fn mixed_corpus(rng: &mut ChaCha8Rng, prefix: &str, count: usize, vmax: f64) -> Vec<GenSpec> {
    let kinds = [Kind::Hamiltonian, Kind::Harmonic, Kind::Mixed];
    (0..count)
        .map(|i| random_spec(rng, format!("{prefix}{i:03}"), kinds[i % 3], vmax))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn specs_respect_kind_and_speed() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let grid = TorusGrid::new(16).unwrap();
        for spec in mixed_corpus(&mut rng, "g", 9, 0.8) {
            let gen = spec.build(grid, 16).unwrap();
            assert!(spec.speed_bound() <= 0.8 + 1e-12);
            match spec.kind {
                Kind::Hamiltonian => assert!(gen.is_hamiltonian(0.0)),
                Kind::Harmonic => assert!(gen.is_harmonic(0.0)),
                Kind::Mixed => assert!(!gen.is_hamiltonian(0.0) && !gen.is_harmonic(0.0)),
            }
        }
    }

    #[test]
    fn seeded_corpus_is_reproducible() {
        let a = mixed_corpus(&mut ChaCha8Rng::seed_from_u64(9), "g", 6, 1.0);
        let b = mixed_corpus(&mut ChaCha8Rng::seed_from_u64(9), "g", 6, 1.0);
        assert_eq!(a, b);
    }
}
