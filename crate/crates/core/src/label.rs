use core::fmt;
use core::str::FromStr;

use crate::Error;

/// Number of language classes.
pub const NUM_LABELS: usize = 6;

/// One of the six Nordic language classes.
///
/// The declaration order is the canonical order used for matrix axes,
/// posterior vectors and argmax tie-breaking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    /// Danish.
    Dk,
    /// Swedish.
    Sv,
    /// Norwegian Nynorsk.
    Nn,
    /// Norwegian Bokmål.
    Nb,
    /// Faroese.
    Fo,
    /// Icelandic.
    Is,
}

impl Label {
    pub const ALL: [Label; NUM_LABELS] =
        [Label::Dk, Label::Sv, Label::Nn, Label::Nb, Label::Fo, Label::Is];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Label> {
        Self::ALL.get(i).copied()
    }

    /// The short code used in dataset files (`"dk"` for Danish).
    pub fn code(self) -> &'static str {
        match self {
            Label::Dk => "dk",
            Label::Sv => "sv",
            Label::Nn => "nn",
            Label::Nb => "nb",
            Label::Fo => "fo",
            Label::Is => "is",
        }
    }

    /// ISO 639-1 code; differs from [`Label::code`] only for Danish.
    pub fn iso_code(self) -> &'static str {
        match self {
            Label::Dk => "da",
            other => other.code(),
        }
    }

    pub fn from_code(code: &str) -> Option<Label> {
        Self::ALL.into_iter().find(|l| l.code() == code)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Label::from_code(s).ok_or_else(|| Error::UnknownLabel(s.into()))
    }
}

/// Index of the largest score; earlier labels win ties.
pub(crate) fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_round_trip_in_order() {
        for (i, l) in Label::ALL.iter().enumerate() {
            assert_eq!(l.index(), i);
            assert_eq!(Label::from_code(l.code()), Some(*l));
        }
        assert_eq!(Label::from_code("da"), None);
        assert_eq!(Label::Dk.iso_code(), "da");
    }

    #[test]
    fn argmax_prefers_first_on_ties() {
        assert_eq!(argmax(&[1.0, 1.0, 0.5]), 0);
        assert_eq!(argmax(&[0.0, 2.0, 2.0]), 1);
    }
}
