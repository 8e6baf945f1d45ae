//! Text forms of pictures and decks.
//!
//! Picture: `n` lines of exactly `n` characters from `{0,1}`, top row first,
//! trailing newline optional.
//!
//! Deck: a header `DECK k=<k> total=<total>` followed by one line per
//! distinct window, `<k² row-major 0/1 chars> <multiplicity>`, sorted
//! ascending by the bit string.

use std::fmt::Write;

use crate::deck::Deck;
use crate::error::{Error, Result};
use crate::grid::{BitGrid, Picture};
use crate::kgrid::KGrid;

pub fn encode_picture(p: &Picture) -> String {
    let n = p.n();
    let mut s = String::with_capacity(n * (n + 1));
    for r in 1..=n {
        for c in 1..=n {
            s.push(if p.cell(r, c) { '1' } else { '0' });
        }
        s.push('\n');
    }
    s
}

pub fn decode_picture(text: &str) -> Result<Picture> {
    let body = text.strip_suffix('\n').unwrap_or(text);
    if body.is_empty() {
        return Err(Error::parse(1, "empty picture"));
    }
    let lines: Vec<&str> = body.split('\n').collect();
    let n = lines.len();
    let mut grid = BitGrid::new(n, n);
    for (r, line) in lines.iter().enumerate() {
        if line.len() != n {
            return Err(Error::parse(
                r + 1,
                format!("expected {n} characters, found {}", line.chars().count()),
            ));
        }
        for (c, ch) in line.bytes().enumerate() {
            match ch {
                b'0' => {}
                b'1' => grid.set(r, c, true),
                _ => {
                    return Err(Error::parse(
                        r + 1,
                        format!("illegal character at column {}", c + 1),
                    ))
                }
            }
        }
    }
    Picture::from_grid(grid)
}

pub fn encode_deck(d: &Deck) -> String {
    let mut s = format!("DECK k={} total={}\n", d.k(), d.total());
    for (g, m) in d.iter() {
        let _ = writeln!(s, "{g} {m}");
    }
    s
}

pub fn decode_deck(text: &str) -> Result<Deck> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing DECK header"))?;
    let (k, total) = parse_header(header)?;
    let mut d = Deck::new(k).map_err(|e| Error::parse(1, e.to_string()))?;
    let mut prev: Option<KGrid> = None;
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let (bits, mult) = line
            .split_once(' ')
            .ok_or_else(|| Error::parse(lineno, "expected `<bits> <multiplicity>`"))?;
        if bits.len() != k * k {
            return Err(Error::parse(
                lineno,
                format!("window has {} cells, header says k={k}", bits.len()),
            ));
        }
        let g = KGrid::from_bit_string(k, bits).map_err(|e| Error::parse(lineno, e.to_string()))?;
        let mult: u32 = mult
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad multiplicity {mult:?}")))?;
        if mult == 0 {
            return Err(Error::parse(lineno, "multiplicity must be at least 1"));
        }
        if prev.is_some_and(|p| p >= g) {
            return Err(Error::parse(lineno, "windows must be strictly ascending"));
        }
        prev = Some(g);
        d.insert(g, mult)
            .map_err(|e| Error::parse(lineno, e.to_string()))?;
    }
    if d.total() != total {
        return Err(Error::parse(
            1,
            format!(
                "header total={total} but multiplicities sum to {}",
                d.total()
            ),
        ));
    }
    Ok(d)
}

fn parse_header(line: &str) -> Result<(usize, u64)> {
    let mut parts = line.split(' ');
    let bad = || Error::parse(1, format!("bad header {line:?}"));
    if parts.next() != Some("DECK") {
        return Err(bad());
    }
    let k = parts
        .next()
        .and_then(|p| p.strip_prefix("k="))
        .and_then(|v| v.parse().ok())
        .ok_or_else(bad)?;
    let total = parts
        .next()
        .and_then(|p| p.strip_prefix("total="))
        .and_then(|v| v.parse().ok())
        .ok_or_else(bad)?;
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok((k, total))
}
