use std::collections::BTreeSet;

use super::{ParseInput, ParseTree};
use crate::error::Result;
use crate::grammar::{left_cancel, right_cancel, Lexicon};
use crate::table::TriangularTable;

/// Exhaustive CKY closure of left and right cancellation. Returns every
/// derivation of every full-span category, with zero activations.
pub fn chart_parse(input: &ParseInput, lexicon: &Lexicon) -> Result<Vec<ParseTree>> {
    let n = input.positions;
    input.validate()?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut chart: TriangularTable<Vec<ParseTree>> = TriangularTable::new(n);
    let mut seeded = BTreeSet::new();
    for m in &input.morphemes {
        for sense in lexicon.require(&m.form)? {
            if seeded.insert((m.form.clone(), sense.clone(), m.span)) {
                chart.cell_mut(m.span.0, m.span.1).push(ParseTree::leaf(
                    m.form.clone(),
                    sense.clone(),
                    m.span,
                    0.0,
                ));
            }
        }
    }
    for len in 2..=n {
        for i in 1..=n + 1 - len {
            let j = i + len - 1;
            let mut built = Vec::new();
            for m in i..j {
                for l in chart.cell(i, m) {
                    for r in chart.cell(m + 1, j) {
                        if let Some(c) = left_cancel(&l.category, &r.category) {
                            built.push(ParseTree::branch(c, (i, j), 0.0, l.clone(), r.clone()));
                        }
                        if let Some(c) = right_cancel(&l.category, &r.category) {
                            built.push(ParseTree::branch(c, (i, j), 0.0, l.clone(), r.clone()));
                        }
                    }
                }
            }
            chart.cell_mut(i, j).extend(built);
        }
    }
    Ok(chart.cell(1, n).clone())
}
