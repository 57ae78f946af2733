//! Degenerate and deliberately broken systems used by the self-test.

use super::{ConstraintError, CylindricSystem};

/// The one-point lattice: `true` and `false` coincide.
#[derive(Debug, Clone)]
pub struct SingletonSystem {
    vars: Vec<String>,
}

impl SingletonSystem {
    pub fn new<V>(vars: V) -> Self
    where
        V: IntoIterator,
        V::Item: Into<String>,
    {
        SingletonSystem {
            vars: vars.into_iter().map(Into::into).collect(),
        }
    }

    fn check(&self, x: &str) -> Result<(), ConstraintError> {
        if self.vars.iter().any(|v| v == x) {
            Ok(())
        } else {
            Err(ConstraintError::UnknownVariable(x.to_string()))
        }
    }
}

impl CylindricSystem for SingletonSystem {
    type Elem = ();

    fn variables(&self) -> &[String] {
        &self.vars
    }

    fn bottom(&self) {}

    fn top(&self) {}

    fn entails(&self, _: &(), _: &()) -> bool {
        true
    }

    fn lub(&self, _: &(), _: &()) {}

    fn exists_var(&self, x: &str, _: &()) -> Result<(), ConstraintError> {
        self.check(x)
    }

    fn diagonal(&self, x: &str, y: &str) -> Result<Option<()>, ConstraintError> {
        self.check(x)?;
        self.check(y)?;
        Ok(Some(()))
    }

    fn enumerate(&self) -> Result<Vec<()>, ConstraintError> {
        Ok(vec![()])
    }

    fn render(&self, _: &()) -> String {
        "true".to_string()
    }
}

/// Wraps a system and replaces cylindrification by the identity.
#[derive(Debug, Clone)]
pub struct IdentityCylinder<S>(pub S);

impl<S: CylindricSystem> CylindricSystem for IdentityCylinder<S> {
    type Elem = S::Elem;

    fn variables(&self) -> &[String] {
        self.0.variables()
    }

    fn constants(&self) -> &[String] {
        self.0.constants()
    }

    fn bottom(&self) -> S::Elem {
        self.0.bottom()
    }

    fn top(&self) -> S::Elem {
        self.0.top()
    }

    fn entails(&self, c: &S::Elem, d: &S::Elem) -> bool {
        self.0.entails(c, d)
    }

    fn lub(&self, c: &S::Elem, d: &S::Elem) -> S::Elem {
        self.0.lub(c, d)
    }

    fn exists_var(&self, x: &str, c: &S::Elem) -> Result<S::Elem, ConstraintError> {
        // still reject unknown variables
        self.0.exists_var(x, c)?;
        Ok(c.clone())
    }

    fn diagonal(&self, x: &str, y: &str) -> Result<Option<S::Elem>, ConstraintError> {
        self.0.diagonal(x, y)
    }

    fn enumerate(&self) -> Result<Vec<S::Elem>, ConstraintError> {
        self.0.enumerate()
    }

    fn render(&self, c: &S::Elem) -> String {
        self.0.render(c)
    }

    fn atom(&self, lhs: &str, rhs: &str) -> Result<S::Elem, ConstraintError> {
        self.0.atom(lhs, rhs)
    }
}
