use std::cmp::Ordering;
use std::fmt;

use super::Span;
use crate::grammar::{left_cancel, right_cancel, Category};

/// A derivation tree. Leaves are lexical senses; each internal node joins
/// two adjacent children by one cancellation.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseTree {
    pub category: Category,
    pub span: Span,
    pub activation: f64,
    /// Morpheme form, for leaves.
    pub form: Option<String>,
    /// Left to right.
    pub children: Vec<ParseTree>,
}

impl ParseTree {
    pub fn leaf(form: String, category: Category, span: Span, activation: f64) -> Self {
        ParseTree {
            category,
            span,
            activation,
            form: Some(form),
            children: Vec::new(),
        }
    }

    /// Internal node over a functor and its argument, in either order.
    pub fn branch(
        category: Category,
        span: Span,
        activation: f64,
        a: ParseTree,
        b: ParseTree,
    ) -> Self {
        let children = if a.span.0 <= b.span.0 {
            vec![a, b]
        } else {
            vec![b, a]
        };
        ParseTree {
            category,
            span,
            activation,
            form: None,
            children,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(ParseTree::size).sum::<usize>()
    }

    pub fn leaves(&self) -> Vec<&ParseTree> {
        if self.is_leaf() {
            return vec![self];
        }
        self.children.iter().flat_map(|c| c.leaves()).collect()
    }

    /// Spans in pre-order.
    pub fn spans(&self) -> Vec<Span> {
        let mut out = vec![self.span];
        for c in &self.children {
            out.extend(c.spans());
        }
        out
    }

    /// Structural equality ignoring activations.
    pub fn same_shape(&self, other: &ParseTree) -> bool {
        self.category == other.category
            && self.span == other.span
            && self.form == other.form
            && self.children.len() == other.children.len()
            && self
                .children
                .iter()
                .zip(&other.children)
                .all(|(a, b)| a.same_shape(b))
    }

    /// Higher activation first, then fewer nodes, then leftmost spans, then
    /// the bracketed rendering.
    pub fn rank_cmp(a: &ParseTree, b: &ParseTree) -> Ordering {
        b.activation
            .total_cmp(&a.activation)
            .then(a.size().cmp(&b.size()))
            .then_with(|| a.spans().cmp(&b.spans()))
            .then_with(|| a.to_string().cmp(&b.to_string()))
    }

    /// Checks that every internal node follows from its children by one
    /// cancellation over abutting spans.
    pub fn validate(&self) -> Result<(), String> {
        match self.children.as_slice() {
            [] => Ok(()),
            [l, r] => {
                l.validate()?;
                r.validate()?;
                if l.span.1 + 1 != r.span.0 || (l.span.0, r.span.1) != self.span {
                    return Err(format!(
                        "{} does not tile {}",
                        self.children_label(),
                        self.label()
                    ));
                }
                let ok = left_cancel(&l.category, &r.category).as_ref() == Some(&self.category)
                    || right_cancel(&l.category, &r.category).as_ref() == Some(&self.category);
                if ok {
                    Ok(())
                } else {
                    Err(format!(
                        "{} does not cancel to {}",
                        self.children_label(),
                        self.label()
                    ))
                }
            }
            _ => Err(format!("{} is not binary", self.label())),
        }
    }

    fn label(&self) -> String {
        format!("{}({},{})", self.category, self.span.0, self.span.1)
    }

    fn children_label(&self) -> String {
        self.children
            .iter()
            .map(ParseTree::label)
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Bracketed form: `[cat(i,j) child child]`, leaves `[cat(i,j) form]`.
impl fmt::Display for ParseTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}", self.label())?;
        if let Some(form) = &self.form {
            write!(f, " {form}")?;
        }
        for c in &self.children {
            write!(f, " {c}")?;
        }
        f.write_str("]")
    }
}
