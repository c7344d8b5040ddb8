use std::fmt;
use std::str::FromStr;

use crate::error::{data_lines, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayMode {
    /// `a·(1−d)`: `d` is the share lost per cycle.
    PaperLiteral,
    /// `a·d`: `d` is the share kept per cycle.
    Retention,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpreadDown {
    /// `ρ'·a` is divided among the children.
    Partition,
    /// Every child receives `ρ'·a`.
    Whole,
}

/// How a generated node counts required (Cr) and bound (Ca) constituents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constituents {
    /// Cr is the argument count of the generating functor, Ca the one
    /// argument bound, so a partial application is penalized by `1/Cr`.
    Arity,
    /// The functor and its argument are the two constituents; every
    /// generated node is complete once materialized.
    Binary,
}

macro_rules! keyword_enum {
    ($ty:ty { $($word:literal => $var:expr),+ $(,)? }) => {
        impl FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($word => Ok($var),)+
                    _ => Err(Error::Params(format!(
                        "unknown value {s:?}; expected one of {}",
                        [$($word),+].join(", ")
                    ))),
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                $(if *self == $var { return f.write_str($word); })+
                unreachable!()
            }
        }
    };
}

keyword_enum!(DecayMode {
    "paper-literal" => DecayMode::PaperLiteral,
    "retention" => DecayMode::Retention,
});
keyword_enum!(SpreadDown {
    "partition" => SpreadDown::Partition,
    "whole" => SpreadDown::Whole,
});
keyword_enum!(Constituents {
    "arity" => Constituents::Arity,
    "binary" => Constituents::Binary,
});

#[derive(Debug, Clone, PartialEq)]
pub struct RelaxationParams {
    pub rho: f64,
    pub rho_prime: f64,
    pub d: f64,
    pub theta: f64,
    pub phi: f64,
    pub init_lexical: f64,
    pub init_generated: f64,
    pub max_cycles: usize,
    pub stability_window: usize,
    pub decay_mode: DecayMode,
    pub spread_down: SpreadDown,
    pub constituents: Constituents,
    /// Basic category name accepted at the root of a full parse.
    pub root: String,
}

impl Default for RelaxationParams {
    fn default() -> Self {
        RelaxationParams {
            rho: 0.05,
            rho_prime: 0.03,
            d: 0.87,
            theta: 0.51,
            phi: 0.066,
            init_lexical: 1.0,
            init_generated: 0.2,
            max_cycles: 200,
            stability_window: 5,
            decay_mode: DecayMode::PaperLiteral,
            spread_down: SpreadDown::Partition,
            constituents: Constituents::Arity,
            root: "s".into(),
        }
    }
}

impl RelaxationParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rho", self.rho),
            ("rho_prime", self.rho_prime),
            ("d", self.d),
            ("theta", self.theta),
            ("phi", self.phi),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Params(format!("{name} = {v} is outside [0, 1]")));
            }
        }
        for (name, v) in [
            ("init_lexical", self.init_lexical),
            ("init_generated", self.init_generated),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Params(format!("{name} = {v} must be non-negative")));
            }
        }
        if self.phi >= self.theta {
            return Err(Error::Params(format!(
                "phi ({}) must be below theta ({})",
                self.phi, self.theta
            )));
        }
        if self.max_cycles == 0 {
            return Err(Error::Params("max_cycles must be at least 1".into()));
        }
        if self.stability_window == 0 {
            return Err(Error::Params("stability_window must be at least 1".into()));
        }
        if self.root.is_empty() {
            return Err(Error::Params("root category name is empty".into()));
        }
        Ok(())
    }

    /// Reads `key=value` lines over the defaults.
    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let mut p = RelaxationParams::default();
        for (line_no, line) in data_lines(text) {
            p.set_line(line)
                .map_err(|e| Error::at_line(source_name, line_no, e))?;
        }
        p.validate()
            .map_err(|e| Error::at_line(source_name, 0, e))?;
        Ok(p)
    }

    /// Applies one `key=value` assignment.
    pub fn set_line(&mut self, line: &str) -> Result<()> {
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Params(format!("expected key=value, found {line:?}")));
        };
        self.set(key.trim(), value.trim())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse()
                .map_err(|_| Error::Params(format!("{key}: cannot parse {v:?}")))
        }
        match key {
            "rho" => self.rho = num(key, value)?,
            "rho_prime" => self.rho_prime = num(key, value)?,
            "d" => self.d = num(key, value)?,
            "theta" => self.theta = num(key, value)?,
            "phi" => self.phi = num(key, value)?,
            "init_lexical" => self.init_lexical = num(key, value)?,
            "init_generated" => self.init_generated = num(key, value)?,
            "max_cycles" => self.max_cycles = num(key, value)?,
            "stability_window" => self.stability_window = num(key, value)?,
            "decay_mode" => self.decay_mode = value.parse()?,
            "spread_down" => self.spread_down = value.parse()?,
            "constituents" => self.constituents = value.parse()?,
            "root" => self.root = value.to_string(),
            _ => return Err(Error::Params(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        format!(
            "rho={}\nrho_prime={}\nd={}\ntheta={}\nphi={}\ninit_lexical={}\ninit_generated={}\n\
             max_cycles={}\nstability_window={}\ndecay_mode={}\nspread_down={}\nconstituents={}\nroot={}\n",
            self.rho,
            self.rho_prime,
            self.d,
            self.theta,
            self.phi,
            self.init_lexical,
            self.init_generated,
            self.max_cycles,
            self.stability_window,
            self.decay_mode,
            self.spread_down,
            self.constituents,
            self.root,
        )
    }
}
