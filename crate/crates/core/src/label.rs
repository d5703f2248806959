//! Tumor class hierarchy: two coarse classes, each with four subclasses.

use alloc::string::String;
use core::fmt;

/// Coarse tumor class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Coarse {
    Benign,
    Malignant,
}

impl Coarse {
    pub const ALL: [Coarse; 2] = [Coarse::Benign, Coarse::Malignant];

    pub fn token(self) -> &'static str {
        match self {
            Coarse::Benign => "benign",
            Coarse::Malignant => "malignant",
        }
    }

    pub fn from_token(s: &str) -> Option<Self> {
        match normalize(s).as_str() {
            "benign" | "b" => Some(Coarse::Benign),
            "malignant" | "m" => Some(Coarse::Malignant),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Coarse::Benign => 0,
            Coarse::Malignant => 1,
        }
    }
}

/// Tumor subclass. The first four are benign, the last four malignant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Subclass {
    /// Adenosis
    A,
    /// Fibroadenoma
    F,
    /// Tubular adenoma
    TA,
    /// Phyllodes tumor
    PA,
    /// Ductal carcinoma
    DC,
    /// Lobular carcinoma
    LC,
    /// Mucinous carcinoma
    MC,
    /// Papillary carcinoma
    PC,
}

impl Subclass {
    pub const ALL: [Subclass; 8] = [
        Subclass::A,
        Subclass::F,
        Subclass::TA,
        Subclass::PA,
        Subclass::DC,
        Subclass::LC,
        Subclass::MC,
        Subclass::PC,
    ];

    pub fn coarse(self) -> Coarse {
        match self {
            Subclass::A | Subclass::F | Subclass::TA | Subclass::PA => Coarse::Benign,
            Subclass::DC | Subclass::LC | Subclass::MC | Subclass::PC => Coarse::Malignant,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            Subclass::A => "A",
            Subclass::F => "F",
            Subclass::TA => "TA",
            Subclass::PA => "PA",
            Subclass::DC => "DC",
            Subclass::LC => "LC",
            Subclass::MC => "MC",
            Subclass::PC => "PC",
        }
    }

    /// Parses a short token or a full subclass name (case-insensitive;
    /// spaces and hyphens are treated as underscores).
    pub fn from_token(s: &str) -> Option<Self> {
        match normalize(s).as_str() {
            "a" | "adenosis" => Some(Subclass::A),
            "f" | "fibroadenoma" => Some(Subclass::F),
            "ta" | "tubular_adenoma" => Some(Subclass::TA),
            "pa" | "phyllodes_tumor" | "phyllodes_adenoma" => Some(Subclass::PA),
            "dc" | "ductal_carcinoma" => Some(Subclass::DC),
            "lc" | "lobular_carcinoma" => Some(Subclass::LC),
            "mc" | "mucinous_carcinoma" => Some(Subclass::MC),
            "pc" | "papillary_carcinoma" => Some(Subclass::PC),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        Subclass::ALL.iter().position(|s| *s == self).unwrap()
    }
}

fn normalize(s: &str) -> String {
    s.chars()
        .map(|c| match c {
            '-' | ' ' => '_',
            c => c.to_ascii_lowercase(),
        })
        .collect()
}

/// A validated (coarse, subclass) pair. The coarse class is implied by the
/// subclass, so a mismatched pair cannot be constructed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassLabel {
    subclass: Subclass,
}

impl ClassLabel {
    /// Builds a label from an explicit pair, rejecting mismatches.
    pub fn new(coarse: Coarse, subclass: Subclass) -> Result<Self, LabelError> {
        if subclass.coarse() != coarse {
            return Err(LabelError::MismatchedHierarchy { coarse, subclass });
        }
        Ok(Self { subclass })
    }

    pub fn from_subclass(subclass: Subclass) -> Self {
        Self { subclass }
    }

    pub fn coarse(self) -> Coarse {
        self.subclass.coarse()
    }

    pub fn subclass(self) -> Subclass {
        self.subclass
    }
}

/// Slide magnification at acquisition time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Magnification {
    X40,
    X100,
    X200,
    X400,
}

impl Magnification {
    pub fn token(self) -> &'static str {
        match self {
            Magnification::X40 => "40X",
            Magnification::X100 => "100X",
            Magnification::X200 => "200X",
            Magnification::X400 => "400X",
        }
    }

    pub fn from_token(s: &str) -> Option<Self> {
        match s.to_ascii_uppercase().as_str() {
            "40X" => Some(Magnification::X40),
            "100X" => Some(Magnification::X100),
            "200X" => Some(Magnification::X200),
            "400X" => Some(Magnification::X400),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LabelError {
    MismatchedHierarchy { coarse: Coarse, subclass: Subclass },
}

impl fmt::Display for LabelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelError::MismatchedHierarchy { coarse, subclass } => write!(
                f,
                "subclass {} does not belong to coarse class {}",
                subclass.token(),
                coarse.token()
            ),
        }
    }
}

impl core::error::Error for LabelError {}
