use std::fmt;

use super::{ConstraintError, CylindricSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    /// `c ⊢ ∃x c`
    I,
    /// `c ⊢ d` implies `∃x c ⊢ ∃x d`
    II,
    /// `∃x (c ⊔ ∃x d) = ∃x c ⊔ ∃x d`
    III,
    /// `∃x ∃y c = ∃y ∃x c`
    IV,
    /// `true ⊢ d_xx`
    V,
    /// `d_xy = ∃z (d_xz ⊔ d_zy)` for `z ∉ {x, y}`
    VI,
    /// `d_xy ⊔ ∃x (c ⊔ d_xy) ⊢ c` for `x ≠ y`
    VII,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::I => "(i)",
            Axiom::II => "(ii)",
            Axiom::III => "(iii)",
            Axiom::IV => "(iv)",
            Axiom::V => "(v)",
            Axiom::VI => "(vi)",
            Axiom::VII => "(vii)",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomViolation {
    pub axiom: Axiom,
    pub instance: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AxiomReport {
    pub elements: usize,
    pub instances_checked: usize,
    /// False when the system has no diagonal elements; axioms (v)-(vii) are
    /// then not checked.
    pub diagonals_checked: bool,
    pub violations: Vec<AxiomViolation>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violated(&self, axiom: Axiom) -> bool {
        self.violations.iter().any(|v| v.axiom == axiom)
    }
}

/// Exhaustively checks axioms (i)-(vii) over every element and every choice
/// of variables.
pub fn check_cylindric_axioms<S: CylindricSystem>(sys: &S) -> Result<AxiomReport, ConstraintError> {
    let elems = sys.enumerate()?;
    let vars = sys.variables();
    let mut report = AxiomReport {
        elements: elems.len(),
        diagonals_checked: true,
        ..AxiomReport::default()
    };
    let show = |c: &S::Elem| sys.render(c);
    let fail = |report: &mut AxiomReport, axiom, instance: String| {
        report.violations.push(AxiomViolation { axiom, instance });
    };

    for x in vars {
        let ex: Vec<S::Elem> = elems.iter().map(|c| sys.exists_var(x, c)).collect::<Result<_, _>>()?;
        for (i, c) in elems.iter().enumerate() {
            report.instances_checked += 1;
            if !sys.entails(c, &ex[i]) {
                fail(&mut report, Axiom::I, format!("x={x}, c={}", show(c)));
            }
            for (j, d) in elems.iter().enumerate() {
                report.instances_checked += 2;
                if sys.entails(c, d) && !sys.entails(&ex[i], &ex[j]) {
                    fail(&mut report, Axiom::II, format!("x={x}, c={}, d={}", show(c), show(d)));
                }
                let lhs = sys.exists_var(x, &sys.lub(c, &ex[j]))?;
                let rhs = sys.lub(&ex[i], &ex[j]);
                if lhs != rhs {
                    fail(&mut report, Axiom::III, format!("x={x}, c={}, d={}", show(c), show(d)));
                }
            }
        }
        for y in vars {
            for c in &elems {
                report.instances_checked += 1;
                let xy = sys.exists_var(x, &sys.exists_var(y, c)?)?;
                let yx = sys.exists_var(y, &sys.exists_var(x, c)?)?;
                if xy != yx {
                    fail(&mut report, Axiom::IV, format!("x={x}, y={y}, c={}", show(c)));
                }
            }
        }
    }

    let bottom = sys.bottom();
    'diag: for x in vars {
        for y in vars {
            let Some(dxy) = sys.diagonal(x, y)? else {
                report.diagonals_checked = false;
                break 'diag;
            };
            if x == y {
                report.instances_checked += 1;
                if !sys.entails(&bottom, &dxy) {
                    fail(&mut report, Axiom::V, format!("x={x}"));
                }
            }
            for z in vars {
                if z == x || z == y {
                    continue;
                }
                report.instances_checked += 1;
                let (Some(dxz), Some(dzy)) = (sys.diagonal(x, z)?, sys.diagonal(z, y)?) else {
                    report.diagonals_checked = false;
                    break 'diag;
                };
                if dxy != sys.exists_var(z, &sys.lub(&dxz, &dzy))? {
                    fail(&mut report, Axiom::VI, format!("x={x}, y={y}, z={z}"));
                }
            }
            if x != y {
                for c in &elems {
                    report.instances_checked += 1;
                    let lhs = sys.lub(&dxy, &sys.exists_var(x, &sys.lub(c, &dxy))?);
                    if !sys.entails(&lhs, c) {
                        fail(&mut report, Axiom::VII, format!("x={x}, y={y}, c={}", show(c)));
                    }
                }
            }
        }
    }
    if !report.diagonals_checked {
        report
            .violations
            .retain(|v| !matches!(v.axiom, Axiom::V | Axiom::VI | Axiom::VII));
    }
    Ok(report)
}
