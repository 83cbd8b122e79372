//! Named coefficient expressions.
//!
//! Every expression is written in the reference coordinate
//! `xi = (x - x_L) / L` of the domain `(x_L, x_R)`, so `sin(pi xi)` vanishes
//! at both ends of any interval.

use crate::error::{config, Result};
use crate::fem1d::{CoefficientField, SpaceFn, SpaceTimeFn};
use crate::timestep::InitialDatum;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    Kappa,
    F,
    G,
    U0,
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Slot::Kappa => "kappa",
            Slot::F => "F",
            Slot::G => "g",
            Slot::U0 => "u0",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CatalogEntry {
    pub slot: Slot,
    pub id: &'static str,
    pub formula: &'static str,
}

const ENTRIES: &[CatalogEntry] = &[
    CatalogEntry { slot: Slot::Kappa, id: "const1", formula: "1" },
    CatalogEntry { slot: Slot::Kappa, id: "const2", formula: "2" },
    CatalogEntry { slot: Slot::Kappa, id: "var", formula: "1 + 0.5 sin(pi xi)" },
    CatalogEntry { slot: Slot::F, id: "zero", formula: "0" },
    CatalogEntry { slot: Slot::F, id: "const1", formula: "1" },
    CatalogEntry { slot: Slot::F, id: "lin_t", formula: "t" },
    CatalogEntry { slot: Slot::F, id: "quad_t", formula: "1 + t^2" },
    CatalogEntry { slot: Slot::F, id: "xdep", formula: "1 + xi" },
    CatalogEntry { slot: Slot::G, id: "zero", formula: "0" },
    CatalogEntry { slot: Slot::G, id: "sin1", formula: "sin(pi xi)" },
    CatalogEntry { slot: Slot::G, id: "tsin", formula: "t sin(pi xi)" },
    CatalogEntry { slot: Slot::U0, id: "zero", formula: "0" },
    CatalogEntry { slot: Slot::U0, id: "sin1", formula: "sin(pi xi)" },
    CatalogEntry { slot: Slot::U0, id: "sin12", formula: "sin(pi xi) + 0.5 sin(2 pi xi)" },
    CatalogEntry { slot: Slot::U0, id: "poly", formula: "4 xi (1 - xi)" },
];

pub fn entries() -> &'static [CatalogEntry] {
    ENTRIES
}

/// `slot:id  formula` lines, one per entry.
pub fn listing() -> String {
    ENTRIES.iter().map(|e| format!("{:<14}{}\n", format!("{}:{}", e.slot, e.id), e.formula)).collect()
}

fn unknown<T>(slot: Slot, id: &str) -> Result<T> {
    let known: Vec<&str> = ENTRIES.iter().filter(|e| e.slot == slot).map(|e| e.id).collect();
    config(format!("unknown {slot} expression '{id}' (known: {})", known.join(", ")))
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Domain {
    x_left: f64,
    length: f64,
}

impl Domain {
    fn new(x_left: f64, x_right: f64) -> Result<Self> {
        if !(x_right > x_left) || !x_left.is_finite() || !x_right.is_finite() {
            return config(format!("degenerate interval [{x_left}, {x_right}]"));
        }
        Ok(Domain { x_left, length: x_right - x_left })
    }

    fn xi(self) -> impl Fn(f64) -> f64 + Copy + Send + Sync {
        move |x| (x - self.x_left) / self.length
    }
}

/// Coefficient field from catalog ids; `final_time` fixes the forcing bounds.
pub fn coefficient_field(
    x_left: f64,
    x_right: f64,
    final_time: f64,
    kappa: &str,
    forcing: &str,
    source: &str,
) -> Result<CoefficientField> {
    let xi = Domain::new(x_left, x_right)?.xi();
    let mut field = match kappa {
        "const1" => CoefficientField::constant_kappa(1.0)?,
        "const2" => CoefficientField::constant_kappa(2.0)?,
        "var" => CoefficientField::new(Arc::new(move |x| 1.0 + 0.5 * (PI * xi(x)).sin()), 1.0)?,
        _ => return unknown(Slot::Kappa, kappa),
    };
    let t = final_time.max(0.0);
    let f: Option<(SpaceTimeFn, SpaceTimeFn, f64, f64)> = match forcing {
        "zero" => None,
        "const1" => Some((Arc::new(|_, _| 1.0), Arc::new(|_, _| 0.0), 1.0, 0.0)),
        "lin_t" => Some((Arc::new(|_, t| t), Arc::new(|_, _| 1.0), t, 1.0)),
        "quad_t" => Some((Arc::new(|_, t| 1.0 + t * t), Arc::new(|_, t| 2.0 * t), 1.0 + t * t, 2.0 * t)),
        "xdep" => Some((Arc::new(move |x, _| 1.0 + xi(x)), Arc::new(|_, _| 0.0), 2.0, 0.0)),
        _ => return unknown(Slot::F, forcing),
    };
    if let Some((f, ft, b, bt)) = f {
        field = field.with_forcing(f, ft, b, bt);
    }
    let g: Option<SpaceTimeFn> = match source {
        "zero" => None,
        "sin1" => Some(Arc::new(move |x, _| (PI * xi(x)).sin())),
        "tsin" => Some(Arc::new(move |x, t| t * (PI * xi(x)).sin())),
        _ => return unknown(Slot::G, source),
    };
    if let Some(g) = g {
        field = field.with_source(g);
    }
    Ok(field)
}

/// An initial datum with its derivative and, when finite, its sine modes.
#[derive(Clone)]
pub struct InitialEntry {
    pub datum: InitialDatum,
    pub modes: Option<Vec<(usize, f64)>>,
}

impl fmt::Debug for InitialEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InitialEntry").field("modes", &self.modes).finish_non_exhaustive()
    }
}

fn sine_modes(xi: impl Fn(f64) -> f64 + Copy + Send + Sync + 'static, length: f64, modes: Vec<(usize, f64)>) -> InitialEntry {
    let (m1, m2) = (modes.clone(), modes.clone());
    let value: SpaceFn = Arc::new(move |x| m1.iter().map(|&(m, a)| a * (m as f64 * PI * xi(x)).sin()).sum());
    let deriv: SpaceFn = Arc::new(move |x| {
        m2.iter().map(|&(m, a)| a * m as f64 * PI / length * (m as f64 * PI * xi(x)).cos()).sum()
    });
    InitialEntry { datum: InitialDatum::new(value, Some(deriv)), modes: Some(modes) }
}

pub fn initial_datum(x_left: f64, x_right: f64, id: &str) -> Result<InitialEntry> {
    let dom = Domain::new(x_left, x_right)?;
    let xi = dom.xi();
    Ok(match id {
        "zero" => InitialEntry { datum: InitialDatum::zero(), modes: Some(Vec::new()) },
        "sin1" => sine_modes(xi, dom.length, vec![(1, 1.0)]),
        "sin12" => sine_modes(xi, dom.length, vec![(1, 1.0), (2, 0.5)]),
        "poly" => {
            let l = dom.length;
            InitialEntry {
                datum: InitialDatum::new(
                    Arc::new(move |x| 4.0 * xi(x) * (1.0 - xi(x))),
                    Some(Arc::new(move |x| 4.0 * (1.0 - 2.0 * xi(x)) / l)),
                ),
                modes: None,
            }
        }
        _ => return unknown(Slot::U0, id),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn listing_contains_required_entries() {
        let s = listing();
        for line in ["u0:sin1", "F:const1", "g:tsin", "kappa:const1"] {
            assert!(s.contains(line), "{line}");
        }
        assert!(s.lines().any(|l| l.starts_with("u0:sin1") && l.ends_with("sin(pi xi)")));
    }

    #[test]
    fn every_entry_builds() {
        for e in entries() {
            let r = match e.slot {
                Slot::Kappa => coefficient_field(0.0, 2.0, 1.0, e.id, "zero", "zero").map(|_| ()),
                Slot::F => coefficient_field(0.0, 2.0, 1.0, "const1", e.id, "zero").map(|_| ()),
                Slot::G => coefficient_field(0.0, 2.0, 1.0, "const1", "zero", e.id).map(|_| ()),
                Slot::U0 => initial_datum(0.0, 2.0, e.id).map(|_| ()),
            };
            assert!(r.is_ok(), "{e:?}");
        }
        assert!(coefficient_field(0.0, 1.0, 1.0, "nope", "zero", "zero").is_err());
        assert!(initial_datum(0.0, 1.0, "nope").is_err());
    }

    #[test]
    fn expressions_use_reference_coordinate() {
        let u = initial_datum(1.0, 3.0, "sin12").unwrap();
        let v = |x: f64| u.datum.value(x);
        assert!(v(1.0).abs() < 1e-15 && v(3.0).abs() < 1e-15);
        assert!((v(2.0) - 1.0).abs() < 1e-15);
        let du = u.datum.derivative().unwrap();
        let h = 1e-6;
        assert!((du(1.7) - (v(1.7 + h) - v(1.7 - h)) / (2.0 * h)).abs() < 1e-8);
        let c = coefficient_field(1.0, 3.0, 2.0, "var", "quad_t", "tsin").unwrap();
        assert!((c.kappa(2.0) - 1.5).abs() < 1e-15);
        assert_eq!(c.forcing_bounds(), (5.0, 4.0));
        assert!((c.source(2.0, 0.5) - 0.5).abs() < 1e-15);
    }
}
