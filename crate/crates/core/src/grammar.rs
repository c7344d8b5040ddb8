//! Categorial grammar with unordered argument sets.
//!
//! A complex category `b\{a1,a2}` takes its arguments from the left in any
//! order; `b/{a1,a2}` takes them from the right.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{data_lines, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    /// `result\S`: arguments on the left.
    Left,
    /// `result/S`: arguments on the right.
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    Basic {
        name: String,
        feature: Option<String>,
    },
    Complex {
        result: Box<Category>,
        dir: Direction,
        /// Sorted, so equal multisets compare equal.
        args: Vec<Category>,
    },
}

impl Category {
    pub fn basic(name: impl Into<String>) -> Self {
        Category::Basic {
            name: name.into(),
            feature: None,
        }
    }

    pub fn featured(name: impl Into<String>, feature: impl Into<String>) -> Self {
        Category::Basic {
            name: name.into(),
            feature: Some(feature.into()),
        }
    }

    /// Builds a complex category. Panics on an empty argument set.
    pub fn complex(result: Category, dir: Direction, mut args: Vec<Category>) -> Self {
        assert!(!args.is_empty(), "complex category needs arguments");
        args.sort();
        Category::Complex {
            result: Box::new(result),
            dir,
            args,
        }
    }

    pub fn is_basic(&self) -> bool {
        matches!(self, Category::Basic { .. })
    }

    /// Name of a basic category.
    pub fn name(&self) -> Option<&str> {
        match self {
            Category::Basic { name, .. } => Some(name),
            Category::Complex { .. } => None,
        }
    }

    /// Number of arguments still to be cancelled; 0 for basic categories.
    pub fn arity(&self) -> usize {
        match self {
            Category::Basic { .. } => 0,
            Category::Complex { args, .. } => args.len(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut p = CatParser {
            src: text,
            chars: text.char_indices().peekable(),
        };
        let cat = p.category()?;
        p.skip_ws();
        if let Some((pos, c)) = p.chars.next() {
            return Err(p.error(format!("unexpected {c:?} at {pos}")));
        }
        Ok(cat)
    }

    fn cancel(arg: &Category, functor: &Category, want: Direction) -> Option<Category> {
        let Category::Complex { result, dir, args } = functor else {
            return None;
        };
        if *dir != want {
            return None;
        }
        let k = args.iter().position(|a| a == arg)?;
        let mut rest = args.clone();
        rest.remove(k);
        Some(if rest.is_empty() {
            (**result).clone()
        } else {
            Category::Complex {
                result: result.clone(),
                dir: *dir,
                args: rest,
            }
        })
    }
}

/// `arg  result\S` with `arg ∈ S` gives `result\(S − {arg})`, or bare
/// `result` once the set is exhausted.
pub fn left_cancel(arg: &Category, functor: &Category) -> Option<Category> {
    Category::cancel(arg, functor, Direction::Left)
}

/// `result/S  arg` with `arg ∈ S`, the mirror image of [`left_cancel`].
pub fn right_cancel(functor: &Category, arg: &Category) -> Option<Category> {
    Category::cancel(arg, functor, Direction::Right)
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Category::Basic {
                name,
                feature: None,
            } => f.write_str(name),
            Category::Basic {
                name,
                feature: Some(feat),
            } => write!(f, "{name}[{feat}]"),
            Category::Complex { result, dir, args } => {
                if result.is_basic() {
                    write!(f, "{result}")?;
                } else {
                    write!(f, "({result})")?;
                }
                f.write_str(match dir {
                    Direction::Left => "\\{",
                    Direction::Right => "/{",
                })?;
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str("}")
            }
        }
    }
}

struct CatParser<'a> {
    src: &'a str,
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
}

impl CatParser<'_> {
    fn error(&self, reason: impl Into<String>) -> Error {
        Error::Category {
            text: self.src.to_string(),
            reason: reason.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.chars.next_if(|(_, c)| c.is_whitespace()).is_some() {}
    }

    fn expect(&mut self, want: char) -> Result<()> {
        self.skip_ws();
        match self.chars.next() {
            Some((_, c)) if c == want => Ok(()),
            Some((pos, c)) => Err(self.error(format!("expected {want:?}, found {c:?} at {pos}"))),
            None => Err(self.error(format!("expected {want:?}, found end of input"))),
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let mut out = String::new();
        while let Some((_, c)) = self
            .chars
            .next_if(|(_, c)| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
        {
            out.push(c);
        }
        if out.is_empty() {
            return Err(self.error("expected a category name"));
        }
        Ok(out)
    }

    fn atom(&mut self) -> Result<Category> {
        self.skip_ws();
        if self.chars.next_if(|(_, c)| *c == '(').is_some() {
            let inner = self.category()?;
            self.expect(')')?;
            return Ok(inner);
        }
        let name = self.ident()?;
        self.skip_ws();
        if self.chars.next_if(|(_, c)| *c == '[').is_some() {
            let feature = self.ident()?;
            self.expect(']')?;
            return Ok(Category::featured(name, feature));
        }
        Ok(Category::basic(name))
    }

    fn category(&mut self) -> Result<Category> {
        let mut cat = self.atom()?;
        loop {
            self.skip_ws();
            let dir = match self.chars.peek() {
                Some((_, '\\')) => Direction::Left,
                Some((_, '/')) => Direction::Right,
                _ => return Ok(cat),
            };
            self.chars.next();
            self.expect('{')?;
            let mut args = vec![self.category()?];
            loop {
                self.skip_ws();
                match self.chars.next() {
                    Some((_, ',')) => args.push(self.category()?),
                    Some((_, '}')) => break,
                    Some((pos, c)) => {
                        return Err(
                            self.error(format!("expected ',' or '}}', found {c:?} at {pos}"))
                        )
                    }
                    None => return Err(self.error("unclosed argument set")),
                }
            }
            cat = Category::complex(cat, dir, args);
        }
    }
}

/// Morpheme form to its category senses. Forms are compared with syllable
/// separators removed, so `ci-wu` and `ciwu` are the same morpheme.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    senses: BTreeMap<String, Vec<Category>>,
}

pub fn normalize_form(form: &str) -> String {
    form.chars()
        .filter(|&c| c != crate::phonology::SYLLABLE_SEPARATOR)
        .collect()
}

impl Lexicon {
    pub fn new() -> Self {
        Lexicon::default()
    }

    pub fn add(&mut self, form: &str, sense: Category) -> Result<()> {
        let senses = self.senses.entry(normalize_form(form)).or_default();
        if senses.contains(&sense) {
            return Err(Error::Lexicon(format!(
                "duplicate sense {sense} for {form}"
            )));
        }
        senses.push(sense);
        Ok(())
    }

    /// Reads `form<TAB>category` lines; repeated forms add senses.
    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let mut lex = Lexicon::new();
        for (line_no, line) in data_lines(text) {
            let Some((form, cat)) = line.split_once('\t') else {
                return Err(Error::at_line(
                    source_name,
                    line_no,
                    "expected form<TAB>category",
                ));
            };
            let cat =
                Category::parse(cat.trim()).map_err(|e| Error::at_line(source_name, line_no, e))?;
            lex.add(form.trim(), cat)
                .map_err(|e| Error::at_line(source_name, line_no, e))?;
        }
        Ok(lex)
    }

    pub fn senses(&self, form: &str) -> Option<&[Category]> {
        self.senses.get(&normalize_form(form)).map(Vec::as_slice)
    }

    pub fn require(&self, form: &str) -> Result<&[Category]> {
        self.senses(form)
            .ok_or_else(|| Error::UnknownMorpheme(form.to_string()))
    }

    pub fn len(&self) -> usize {
        self.senses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.senses.is_empty()
    }

    pub fn forms(&self) -> impl Iterator<Item = &str> {
        self.senses.keys().map(String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cat(s: &str) -> Category {
        Category::parse(s).unwrap()
    }

    #[test]
    fn left_cancellation() {
        assert_eq!(
            left_cancel(&cat("np[obj]"), &cat("s[command]\\{np[subj],np[obj]}")),
            Some(cat("s[command]\\{np[subj]}"))
        );
        assert_eq!(left_cancel(&cat("np"), &cat("s\\{np}")), Some(cat("s")));
        assert_eq!(left_cancel(&cat("np[subj]"), &cat("s\\{np[obj]}")), None);
        assert_eq!(left_cancel(&cat("np"), &cat("np")), None);
    }

    #[test]
    fn right_cancellation() {
        assert_eq!(
            right_cancel(&cat("b/{a1,a2}"), &cat("a1")),
            Some(cat("b/{a2}"))
        );
        assert_eq!(right_cancel(&cat("b/{a}"), &cat("a")), Some(cat("b")));
        assert_eq!(right_cancel(&cat("b\\{a}"), &cat("a")), None);
    }

    #[test]
    fn multiset_arguments() {
        assert_eq!(cat("s\\{a,b}"), cat("s\\{b,a}"));
        assert_ne!(cat("s\\{a,a}"), cat("s\\{a}"));
        assert_eq!(
            left_cancel(&cat("a"), &cat("s\\{a,a}")),
            Some(cat("s\\{a}"))
        );
    }

    #[test]
    fn word_order_freedom() {
        let f = cat("s[command]\\{np[subj],np[obj]}");
        let (x, y) = (cat("np[subj]"), cat("np[obj]"));
        let xy = left_cancel(&y, &left_cancel(&x, &f).unwrap()).unwrap();
        let yx = left_cancel(&x, &left_cancel(&y, &f).unwrap()).unwrap();
        assert_eq!(xy, yx);
        assert_eq!(xy, cat("s[command]"));
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in [
            "np",
            "np[obj]",
            "np\\{np}",
            "s[command]\\{np[obj],np[subj]}",
            "s[command]\\{s[command]\\{np[subj]}}",
            "(np/{np})\\{np}",
            "b/{a}",
        ] {
            assert_eq!(cat(s).to_string(), s);
        }
        assert_eq!(cat(" s \\ { b , a } ").to_string(), "s\\{a,b}");
        assert_eq!(cat("np/{np}\\{np}"), cat("(np/{np})\\{np}"));
    }

    #[test]
    fn malformed_categories() {
        for s in ["", "np\\{}", "np\\{a", "np[", "np)", "\\{a}", "np\\a"] {
            assert!(Category::parse(s).is_err(), "{s:?}");
        }
    }

    #[test]
    fn lexicon_file() {
        let lex =
            Lexicon::parse("# c\nci-wu\ts\\{np}\nciwu\tnp\nul\tnp[obj]\\{np}\n", "lex").unwrap();
        assert_eq!(lex.senses("ciwu").unwrap().len(), 2);
        assert_eq!(lex.senses("ci-wu"), lex.senses("ciwu"));
        assert!(lex.require("tul").is_err());
        assert!(Lexicon::parse("a\tnp\na\tnp\n", "lex").is_err());
        assert!(Lexicon::parse("a np\n", "lex").is_err());
    }
}
