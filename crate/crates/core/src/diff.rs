//! Word-level difference slices.
//!
//! Tokens are aligned by a longest common subsequence; the maximal runs of
//! tokens outside that alignment are the slices of each side.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slice {
    /// Token offset of the slice in its text.
    pub start: usize,
    pub tokens: Vec<String>,
}

impl Slice {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn end(&self) -> usize {
        self.start + self.tokens.len()
    }

    pub fn text(&self) -> String {
        self.tokens.join(" ")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffSlices {
    pub slices_a: Vec<Slice>,
    pub slices_b: Vec<Slice>,
}

impl DiffSlices {
    /// Swaps the two sides.
    pub fn mirrored(self) -> Self {
        DiffSlices {
            slices_a: self.slices_b,
            slices_b: self.slices_a,
        }
    }
}

/// Suffix LCS lengths: `table[i][j]` is the LCS length of `a[i..]` and `b[j..]`.
fn suffix_lcs<T: PartialEq>(a: &[T], b: &[T]) -> Vec<Vec<u32>> {
    let mut table = vec![vec![0u32; b.len() + 1]; a.len() + 1];
    for i in (0..a.len()).rev() {
        for j in (0..b.len()).rev() {
            table[i][j] = if a[i] == b[j] {
                table[i + 1][j + 1] + 1
            } else {
                table[i + 1][j].max(table[i][j + 1])
            };
        }
    }
    table
}

/// Matched index pairs of an LCS alignment. Equal tokens are matched as soon
/// as they meet; on ties the walk advances through `a` first, so each token
/// of `a` pairs with the leftmost admissible token of `b`.
pub fn lcs_alignment<T: PartialEq>(a: &[T], b: &[T]) -> Vec<(usize, usize)> {
    let table = suffix_lcs(a, b);
    let (mut i, mut j) = (0, 0);
    let mut pairs = Vec::with_capacity(table[0][0] as usize);
    while i < a.len() && j < b.len() {
        if a[i] == b[j] {
            pairs.push((i, j));
            i += 1;
            j += 1;
        } else if table[i + 1][j] >= table[i][j + 1] {
            i += 1;
        } else {
            j += 1;
        }
    }
    pairs
}

fn runs(tokens: &[String], matched: impl Iterator<Item = usize>) -> Vec<Slice> {
    let mut keep = vec![false; tokens.len()];
    for m in matched {
        keep[m] = true;
    }
    let mut out = Vec::new();
    let mut current: Option<Slice> = None;
    for (i, tok) in tokens.iter().enumerate() {
        if keep[i] {
            if let Some(s) = current.take() {
                out.push(s);
            }
        } else {
            current
                .get_or_insert_with(|| Slice {
                    start: i,
                    tokens: Vec::new(),
                })
                .tokens
                .push(tok.clone());
        }
    }
    out.extend(current);
    out
}

pub fn word_diff(a: &[String], b: &[String]) -> DiffSlices {
    let pairs = lcs_alignment(a, b);
    DiffSlices {
        slices_a: runs(a, pairs.iter().map(|p| p.0)),
        slices_b: runs(b, pairs.iter().map(|p| p.1)),
    }
}

/// `tokens` with the slice's span removed.
pub fn delete_slice(tokens: &[String], slice: &Slice) -> Vec<String> {
    let mut out = Vec::with_capacity(tokens.len() - slice.len());
    out.extend_from_slice(&tokens[..slice.start]);
    out.extend_from_slice(&tokens[slice.end()..]);
    out
}

/// Rebuilds a text from its common subsequence and its slices.
pub fn splice(common: &[String], slices: &[Slice]) -> Vec<String> {
    let total = common.len() + slices.iter().map(Slice::len).sum::<usize>();
    let mut out = Vec::with_capacity(total);
    let mut common = common.iter();
    let mut slices = slices.iter().peekable();
    while out.len() < total {
        match slices.peek() {
            Some(s) if s.start == out.len() => {
                out.extend(s.tokens.iter().cloned());
                slices.next();
            }
            _ => match common.next() {
                Some(t) => out.push(t.clone()),
                None => break,
            },
        }
    }
    out
}
