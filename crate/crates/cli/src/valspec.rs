//! Text descriptors for simple valuations.
//!
//! ```text
//! valuation := "bottom" | atom ("+" atom)*
//! atom      := [weight "*"] carrier
//! weight    := number | number "/" number
//! carrier   := interval ("x" interval)*     a compact set of the interval or a box
//!            | "{" word ("," word)* "}"      a cylinder union, "*" for the whole space
//!            | "<" coords ">"                a point: "<0.3>", "<0.1,0.2>", "<01|1>"
//! interval  := ("[" | "(") number "," number ("]" | ")")
//! ```
//!
//! Set carriers are replaced by their closures. Cantor points are written
//! `prefix|tail` for the sequence `prefix` followed by `tail` repeated.

use gauge_core::{
    BoxCell, CantorPoint, Carrier, Crescent, CylinderSet, Interval, Point, SimpleValuation, SpaceDescriptor,
    UpperElement, Word,
};

use crate::CliError;

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Descriptor(msg.into())
}

fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut depth = 0i32;
    let mut out = Vec::new();
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '[' | '(' | '{' | '<' => depth += 1,
            ']' | ')' | '}' | '>' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

fn number(s: &str) -> Result<f64, CliError> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let (a, b) = (number(a)?, number(b)?);
        if b == 0.0 {
            return Err(bad(format!("zero denominator in '{s}'")));
        }
        return Ok(a / b);
    }
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| bad(format!("invalid number '{s}'")))
}

fn interval(s: &str) -> Result<Interval, CliError> {
    let s = s.trim();
    let lc = match s.chars().next() {
        Some('[') => true,
        Some('(') => false,
        _ => return Err(bad(format!("an interval starts with '[' or '(': '{s}'"))),
    };
    let rc = match s.chars().last() {
        Some(']') => true,
        Some(')') => false,
        _ => return Err(bad(format!("an interval ends with ']' or ')': '{s}'"))),
    };
    let inner = &s[1..s.len() - 1];
    let (a, b) = inner
        .split_once(',')
        .ok_or_else(|| bad(format!("an interval needs two endpoints: '{s}'")))?;
    let (a, b) = (number(a)?, number(b)?);
    if a > b {
        return Err(bad(format!("interval endpoints out of order: '{s}'")));
    }
    Ok(Interval::new(a, b, lc, rc))
}

fn carrier(s: &str) -> Result<Carrier, CliError> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix('<').and_then(|r| r.strip_suffix('>')) {
        if let Some((prefix, tail)) = inner.split_once('|') {
            let w = Word::parse(prefix.trim()).ok_or_else(|| bad(format!("invalid binary word '{prefix}'")))?;
            let tail = match tail.trim() {
                "0" => false,
                "1" => true,
                t => return Err(bad(format!("a Cantor tail is 0 or 1, got '{t}'"))),
            };
            return Ok(Carrier::Point(Point::Cantor(CantorPoint::new(w, tail))));
        }
        let coords = inner.split(',').map(number).collect::<Result<Vec<_>, _>>()?;
        return Ok(Carrier::Point(match coords[..] {
            [x] => Point::Real(x),
            _ => Point::Vector(coords),
        }));
    }
    if let Some(inner) = s.strip_prefix('{').and_then(|r| r.strip_suffix('}')) {
        let words = inner
            .split(',')
            .map(|w| match w.trim() {
                "*" => Some(Word::EMPTY),
                w => Word::parse(w).filter(|_| !w.is_empty()),
            })
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| bad(format!("invalid cylinder set '{s}'")))?;
        return Ok(Carrier::Set(UpperElement::new(&Crescent::Cantor(CylinderSet::new(words)))?));
    }
    let axes = split_top_level(s, 'x').into_iter().map(interval).collect::<Result<Vec<_>, _>>()?;
    let set = match &axes[..] {
        [i] => Crescent::Interval(*i),
        _ => Crescent::Box(BoxCell::new(axes)),
    };
    if set.is_empty() {
        return Err(bad(format!("carrier '{s}' is empty")));
    }
    Ok(Carrier::Set(UpperElement::new(&set)?))
}

fn space_of(c: &Carrier) -> SpaceDescriptor {
    let dim = |n: usize| if n == 1 { SpaceDescriptor::unit_interval() } else { SpaceDescriptor::unit_cube(n) };
    match c {
        Carrier::Set(u) => match u.set() {
            Crescent::Interval(_) => SpaceDescriptor::unit_interval(),
            Crescent::Box(b) => dim(b.axes.len()),
            Crescent::Cantor(_) => SpaceDescriptor::Cantor,
        },
        Carrier::Point(Point::Real(_)) => SpaceDescriptor::unit_interval(),
        Carrier::Point(Point::Vector(v)) => dim(v.len()),
        Carrier::Point(Point::Cantor(_)) => SpaceDescriptor::Cantor,
    }
}

/// Parses a descriptor on `space`, or on the space its carriers suggest
/// (unit interval, unit cube or Cantor space) when `space` is `None`.
pub fn parse_valuation(s: &str, space: Option<&SpaceDescriptor>) -> Result<SimpleValuation, CliError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(bad("empty valuation descriptor"));
    }
    if s == "bottom" {
        let space = space.cloned().unwrap_or_else(SpaceDescriptor::unit_interval);
        return Ok(SimpleValuation::bottom(space.whole())?);
    }
    let mut atoms = Vec::new();
    for part in split_top_level(s, '+') {
        let part = part.trim();
        let (w, c) = match split_top_level(part, '*')[..] {
            [c] => (1.0, c),
            [w, c] => (number(w)?, c),
            _ => return Err(bad(format!("malformed atom '{part}'"))),
        };
        atoms.push((w, carrier(c)?));
    }
    let space = space.cloned().unwrap_or_else(|| space_of(&atoms[0].1));
    Ok(SimpleValuation::new(space.whole(), atoms)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptors_parse() {
        let v = parse_valuation("1/2*[0,0.5] + 1/2*[0.5,1]", None).unwrap();
        assert_eq!(v.atoms().len(), 2);
        assert_eq!(v.total(), 1.0);
        let b = parse_valuation("0.25*[0,1]x(0.2,0.5) + 0.75*<0.5,0.5>", None).unwrap();
        assert_eq!(b.atoms().len(), 2);
        let c = parse_valuation("0.5*{01,1101} + 0.5*<0|1>", None).unwrap();
        assert!(matches!(c.whole(), Crescent::Cantor(_)));
        assert_eq!(parse_valuation("{*}", None).unwrap(), SimpleValuation::bottom(Crescent::Cantor(CylinderSet::whole())).unwrap());
        assert!(parse_valuation("bottom", None).unwrap().is_normalised());
    }

    #[test]
    fn malformed_descriptors_fail() {
        for s in ["", "0.5*", "[0.5,0.2]", "0.5*[0,2]", "{2}", "<0.1|2>", "1/0*[0,1]", "[0,1", "a*[0,1]"] {
            assert!(parse_valuation(s, None).is_err(), "{s}");
        }
    }
}
