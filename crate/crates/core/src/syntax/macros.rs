//! Derived formulas used by the proof system, expanded to the core grammar.

use super::formula::{Formula, Term};
use crate::constraint::{Constraint, Lattice, VarId};

fn var(p: &str) -> Term {
    Term::var(p)
}

/// `∀p (O(p) ↔ I(p))`
pub fn stut(_lat: &Lattice) -> Formula {
    Formula::forall_constr("p", Formula::iff(Formula::output(var("p")), Formula::input(var("p"))))
}

/// `∀p (∃x p ≠ p → (¬I(p) ∧ □(○I(p) → ∃r (O(r) ∧ ∃x p ⊔ r = p))))`
pub fn loc(lat: &Lattice, x: VarId) -> Formula {
    let cyl = Term::cyl(x, var("p"));
    let carried = Formula::exists_constr(
        "r",
        Formula::and(
            Formula::output(var("r")),
            Formula::eq(Term::lub(cyl.clone(), var("r")), var("p")),
        ),
    );
    Formula::forall_constr(
        "p",
        Formula::implies(
            Formula::neq(cyl, var("p")),
            Formula::and(
                Formula::not(Formula::input(var("p"))),
                Formula::always(lat, Formula::implies(Formula::next(Formula::input(var("p"))), carried)),
            ),
        ),
    )
}

/// `∀p □(∃x p ≠ p → (O(p) → ∃r (I(r) ∧ ∃x p ⊔ r = p)))`
pub fn inv(lat: &Lattice, x: VarId) -> Formula {
    let cyl = Term::cyl(x, var("p"));
    let from_input = Formula::exists_constr(
        "r",
        Formula::and(
            Formula::input(var("r")),
            Formula::eq(Term::lub(cyl.clone(), var("r")), var("p")),
        ),
    );
    Formula::forall_constr(
        "p",
        Formula::always(
            lat,
            Formula::implies(
                Formula::neq(cyl, var("p")),
                Formula::implies(Formula::output(var("p")), from_input),
            ),
        ),
    )
}

/// `∀p □(O(p) ↔ ∃q1,q2 (X(q1) ∧ Y(q2) ∧ q1 ⊔ q2 = p))`
pub fn par(lat: &Lattice, x: &str, y: &str) -> Formula {
    let split = Formula::exists_constr(
        "q1",
        Formula::exists_constr(
            "q2",
            Formula::and(
                Formula::and(Formula::pred(x, var("q1")), Formula::pred(y, var("q2"))),
                Formula::eq(Term::lub(var("q1"), var("q2")), var("p")),
            ),
        ),
    );
    Formula::forall_constr(
        "p",
        Formula::always(lat, Formula::iff(Formula::output(var("p")), split)),
    )
}

/// The axiom for `tell(c)`:
/// `O(c) ∧ ∀p (O(p) → ∃q (I(q) ∧ q ⊔ c = p)) ∧ ○□stut`
pub fn tell_axiom(lat: &Lattice, c: Constraint) -> Formula {
    let produced = Formula::forall_constr(
        "p",
        Formula::implies(
            Formula::output(var("p")),
            Formula::exists_constr(
                "q",
                Formula::and(
                    Formula::input(var("q")),
                    Formula::eq(Term::lub(var("q"), Term::Const(c)), var("p")),
                ),
            ),
        ),
    );
    Formula::and(
        Formula::and(Formula::output(Term::Const(c)), produced),
        Formula::next(Formula::always(lat, stut(lat))),
    )
}

/// The conclusion formula of the guarded-choice rule for guards `c_i` and
/// branch properties `φ_i`:
/// `⋁_i ((⋀_j ¬I(c_j) ∧ stut) U (I(c_i) ∧ stut ∧ ○φ_i)) ∨ □(⋀_j ¬I(c_j) ∧ stut)`
pub fn choice_formula(lat: &Lattice, branches: &[(Constraint, Formula)]) -> Formula {
    let waiting = || {
        let none = Formula::conj(
            branches
                .iter()
                .map(|(c, _)| Formula::not(Formula::input(Term::Const(*c)))),
        )
        .expect("choice has at least one branch");
        Formula::and(none, stut(lat))
    };
    let taken = branches.iter().map(|(c, phi)| {
        Formula::until(
            waiting(),
            Formula::and(
                Formula::and(Formula::input(Term::Const(*c)), stut(lat)),
                Formula::next(phi.clone()),
            ),
        )
    });
    let some = Formula::disj(taken).expect("choice has at least one branch");
    Formula::or(some, Formula::always(lat, waiting()))
}

/// `(I(c) ∧ φ) ∨ (¬I(c) ∧ ψ)`
pub fn now_formula(c: Constraint, then: Formula, otherwise: Formula) -> Formula {
    let ic = Formula::input(Term::Const(c));
    Formula::or(
        Formula::and(ic.clone(), then),
        Formula::and(Formula::not(ic), otherwise),
    )
}

/// `∃x (φ ∧ loc(x)) ∧ inv(x)`
pub fn hide_formula(lat: &Lattice, x: VarId, phi: Formula) -> Formula {
    Formula::and(Formula::exists_var(x, Formula::and(phi, loc(lat, x))), inv(lat, x))
}

/// `∃X,Y (φ[X/O] ∧ ψ[Y/O] ∧ par(X,Y))`
pub fn par_formula(lat: &Lattice, x: &str, y: &str, phi: &Formula, psi: &Formula) -> Formula {
    Formula::exists_pred(
        x,
        Formula::exists_pred(
            y,
            Formula::and(
                Formula::and(
                    phi.substitute_pred(super::formula::OUTPUT, x),
                    psi.substitute_pred(super::formula::OUTPUT, y),
                ),
                par(lat, x, y),
            ),
        ),
    )
}
