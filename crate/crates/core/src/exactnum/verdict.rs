use std::fmt;

use serde::{Serialize, Serializer};

/// Outcome of a rigorous comparison. `Unknown` records the working precision
/// at which the enclosing balls still overlapped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    True,
    False,
    Unknown(u32),
}

impl Verdict {
    pub fn from_bool(b: bool) -> Verdict {
        if b {
            Verdict::True
        } else {
            Verdict::False
        }
    }

    pub fn is_true(self) -> bool {
        self == Verdict::True
    }

    pub fn is_false(self) -> bool {
        self == Verdict::False
    }

    pub fn is_unknown(self) -> bool {
        matches!(self, Verdict::Unknown(_))
    }

    /// Conjunction: False dominates, then Unknown.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::False, _) | (_, Verdict::False) => Verdict::False,
            (Verdict::Unknown(a), Verdict::Unknown(b)) => Verdict::Unknown(a.min(b)),
            (Verdict::Unknown(a), _) | (_, Verdict::Unknown(a)) => Verdict::Unknown(a),
            _ => Verdict::True,
        }
    }

    pub fn all(it: impl IntoIterator<Item = Verdict>) -> Verdict {
        it.into_iter().fold(Verdict::True, Verdict::and)
    }
}

impl std::ops::Not for Verdict {
    type Output = Verdict;

    fn not(self) -> Verdict {
        match self {
            Verdict::True => Verdict::False,
            Verdict::False => Verdict::True,
            u => u,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::True => write!(f, "True"),
            Verdict::False => write!(f, "False"),
            Verdict::Unknown(p) => write!(f, "Unknown({p})"),
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Re-runs `f` at doubling precision until it returns a decided verdict or
/// `max_prec` is exceeded.
pub fn decide<F: FnMut(u32) -> Verdict>(mut f: F, prec: u32, max_prec: u32) -> Verdict {
    let mut p = prec;
    loop {
        let v = f(p);
        if !v.is_unknown() || p >= max_prec {
            return v;
        }
        p = (p * 2).min(max_prec);
    }
}
