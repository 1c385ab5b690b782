//! The line-oriented `.cdga` document format.
//!
//! A document is a sequence of blocks, each opened by a keyword line and
//! closed by `end`:
//!
//! ```text
//! algebra cp2 table
//!   element 1 0
//!   element x 2
//!   element x^2 4
//!   unit 1
//!   product x * x = x^2
//! end
//!
//! algebra s2-model free
//!   generator x 2
//!   generator y 3
//!   d y = x^2
//!   top 16
//! end
//!
//! morphism restriction
//!   source cp2
//!   target cp1
//!   map x = x
//!   map x^2 = 0
//! end
//!
//! metadata
//!   name cp2
//!   formal true
//! end
//! ```
//!
//! Tokens are whitespace separated; `#` starts a comment. Expressions are
//! sums of terms, each an optional rational coefficient followed by `*`
//! separated factors; `x^2` names the declared element `x^2` when one
//! exists and otherwise means the square of `x`. Every reference is
//! resolved against the document itself before the parse succeeds, so a
//! parsed document is internally consistent by construction.

use std::fmt;

use ratho::scalar::{self, Scalar};

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ModelDocument {
    pub algebras: Vec<AlgebraBlock>,
    pub morphisms: Vec<MorphismBlock>,
    pub metadata: Metadata,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Metadata {
    pub name: Option<String>,
    pub formal: bool,
    pub simply_connected: Option<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum AlgebraBlock {
    Table(TableBlock),
    Free(FreeBlock),
}

impl AlgebraBlock {
    pub fn name(&self) -> &str {
        match self {
            AlgebraBlock::Table(t) => &t.name,
            AlgebraBlock::Free(f) => &f.name,
        }
    }

    pub fn is_free(&self) -> bool {
        matches!(self, AlgebraBlock::Free(_))
    }
}

/// Explicit basis, sparse products, sparse differential.
#[derive(Clone, Debug, PartialEq)]
pub struct TableBlock {
    pub name: String,
    pub elements: Vec<(String, u32)>,
    pub unit: String,
    pub products: Vec<(String, String, Expr)>,
    pub differentials: Vec<(String, Expr)>,
}

/// Free graded-commutative algebra on listed generators, materialized up
/// to `top`.
#[derive(Clone, Debug, PartialEq)]
pub struct FreeBlock {
    pub name: String,
    pub generators: Vec<(String, u32)>,
    pub differentials: Vec<(String, Expr)>,
    pub top: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MorphismBlock {
    pub name: String,
    pub source: String,
    pub target: String,
    /// Images of source elements (tables) or generators (free sources);
    /// anything not listed maps to zero, the unit always to the unit.
    pub images: Vec<(String, Expr)>,
    /// Name of a previously declared morphism splitting this one.
    pub section: Option<String>,
}

pub type Expr = Vec<Term>;

#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub coeff: Scalar,
    pub factors: Vec<(String, u32)>,
}

#[derive(Clone, Debug)]
pub struct Diagnostic {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.message)
    }
}

/// Syntax errors come from the shape of the text, semantic errors from
/// references and degrees that do not add up.
#[derive(Clone, Debug)]
pub enum ParseError {
    Syntax(Diagnostic),
    Semantic(Diagnostic),
}

impl ParseError {
    pub fn diagnostic(&self) -> &Diagnostic {
        match self {
            ParseError::Syntax(d) | ParseError::Semantic(d) => d,
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Syntax(d) => write!(f, "syntax error at {d}"),
            ParseError::Semantic(d) => write!(f, "semantic error at {d}"),
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    line: usize,
    col: usize,
}

fn syntax(line: usize, col: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax(Diagnostic {
        line,
        col,
        message: message.into(),
    })
}

fn semantic(line: usize, col: usize, message: impl Into<String>) -> ParseError {
    ParseError::Semantic(Diagnostic {
        line,
        col,
        message: message.into(),
    })
}

fn tokenize(text: &str) -> Vec<Vec<Token<'_>>> {
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let mut tokens = Vec::new();
        let mut col = 0usize;
        for piece in body.split_inclusive(char::is_whitespace) {
            let trimmed = piece.trim_end_matches(char::is_whitespace);
            if !trimmed.is_empty() {
                tokens.push(Token {
                    text: trimmed,
                    line: i + 1,
                    col: col + 1,
                });
            }
            col += piece.chars().count();
        }
        if !tokens.is_empty() {
            lines.push(tokens);
        }
    }
    lines
}

fn is_identifier(text: &str) -> bool {
    // "1" is the customary name of the unit element.
    if text == "1" {
        return true;
    }
    let mut chars = text.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' => {}
        _ => return false,
    }
    text.chars()
        .all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '^' | '\'' | '⊗' | '·'))
}

fn parse_coeff(text: &str) -> Option<Scalar> {
    let body = text.strip_prefix('-').unwrap_or(text);
    if body.is_empty() || !body.chars().next().unwrap().is_ascii_digit() {
        return None;
    }
    scalar::parse(text).ok()
}

fn parse_u32(tok: &Token<'_>, what: &str) -> Result<u32, ParseError> {
    tok.text
        .parse::<u32>()
        .map_err(|_| syntax(tok.line, tok.col, format!("expected {what}, found `{}`", tok.text)))
}

fn expect_identifier<'a>(tok: &Token<'a>, what: &str) -> Result<&'a str, ParseError> {
    if is_identifier(tok.text) {
        Ok(tok.text)
    } else {
        Err(syntax(
            tok.line,
            tok.col,
            format!("expected {what}, found `{}`", tok.text),
        ))
    }
}

/// Splits `x^3` into a base name and an exponent unless the whole token is
/// a declared name; `declared` decides.
fn parse_factor(
    tok: &Token<'_>,
    declared: &dyn Fn(&str) -> bool,
) -> Result<(String, u32), ParseError> {
    expect_identifier(tok, "a name")?;
    if declared(tok.text) {
        return Ok((tok.text.to_string(), 1));
    }
    if let Some(pos) = tok.text.rfind('^') {
        let (base, rest) = tok.text.split_at(pos);
        if let Ok(exp) = rest[1..].parse::<u32>() {
            if declared(base) {
                if exp == 0 {
                    return Err(semantic(tok.line, tok.col, "exponent must be positive"));
                }
                return Ok((base.to_string(), exp));
            }
        }
    }
    Err(semantic(
        tok.line,
        tok.col,
        format!("unknown name `{}`", tok.text),
    ))
}

/// `0`, or terms separated by `+` / `-`; each term is an optional rational
/// coefficient followed by `*` separated factors.
fn parse_expr(
    tokens: &[Token<'_>],
    line: usize,
    col: usize,
    declared: &dyn Fn(&str) -> bool,
) -> Result<Expr, ParseError> {
    if tokens.is_empty() {
        return Err(syntax(line, col, "expected an expression"));
    }
    if tokens.len() == 1 && tokens[0].text == "0" {
        return Ok(Vec::new());
    }
    let mut terms = Vec::new();
    let mut pos = 0usize;
    let mut negate = false;
    if tokens[0].text == "-" {
        negate = true;
        pos = 1;
        if pos == tokens.len() {
            return Err(syntax(tokens[0].line, tokens[0].col, "dangling operator"));
        }
    }
    loop {
        let mut coeff = scalar::one();
        // A declared name wins over a numeric reading (the unit is "1").
        if !declared(tokens[pos].text) {
            if let Some(c) = parse_coeff(tokens[pos].text) {
                coeff = c;
                pos += 1;
                if pos == tokens.len() {
                    let last = tokens[pos - 1];
                    return Err(syntax(last.line, last.col, "a term needs at least one name"));
                }
            }
        }
        if negate {
            coeff = -coeff;
        }
        let mut factors = vec![parse_factor(&tokens[pos], declared)?];
        pos += 1;
        while pos + 1 < tokens.len() && tokens[pos].text == "*" {
            factors.push(parse_factor(&tokens[pos + 1], declared)?);
            pos += 2;
        }
        terms.push(Term { coeff, factors });
        if pos == tokens.len() {
            return Ok(terms);
        }
        negate = match tokens[pos].text {
            "+" => false,
            "-" => true,
            other => {
                return Err(syntax(
                    tokens[pos].line,
                    tokens[pos].col,
                    format!("expected `+` or `-`, found `{other}`"),
                ))
            }
        };
        pos += 1;
        if pos == tokens.len() {
            let last = tokens[pos - 1];
            return Err(syntax(last.line, last.col, "dangling operator"));
        }
    }
}

fn find_eq(tokens: &[Token<'_>]) -> Option<usize> {
    tokens.iter().position(|t| t.text == "=")
}

pub fn parse_model(text: &str) -> Result<ModelDocument, ParseError> {
    let lines = tokenize(text);
    let mut doc = ModelDocument::default();
    let mut saw_metadata = false;
    let mut i = 0usize;
    while i < lines.len() {
        let head = &lines[i];
        let first = head[0];
        match first.text {
            "algebra" => {
                let (block, next) = parse_algebra(&lines, i, &doc)?;
                doc.algebras.push(block);
                i = next;
            }
            "morphism" => {
                let (block, next) = parse_morphism(&lines, i, &doc)?;
                doc.morphisms.push(block);
                i = next;
            }
            "metadata" => {
                if saw_metadata {
                    return Err(semantic(first.line, first.col, "metadata declared twice"));
                }
                saw_metadata = true;
                let next = parse_metadata(&lines, i, &mut doc.metadata)?;
                i = next;
            }
            other => {
                return Err(syntax(
                    first.line,
                    first.col,
                    format!("expected `algebra`, `morphism` or `metadata`, found `{other}`"),
                ))
            }
        }
    }
    Ok(doc)
}

fn block_lines<'a, 'b>(
    lines: &'b [Vec<Token<'a>>],
    start: usize,
) -> Result<(&'b [Vec<Token<'a>>], usize), ParseError> {
    let mut i = start + 1;
    while i < lines.len() {
        let first = lines[i][0];
        if first.text == "end" {
            if lines[i].len() > 1 {
                let extra = lines[i][1];
                return Err(syntax(extra.line, extra.col, "nothing may follow `end`"));
            }
            return Ok((&lines[start + 1..i], i + 1));
        }
        i += 1;
    }
    let head = lines[start][0];
    Err(syntax(
        head.line,
        head.col,
        format!("block starting here is never closed by `end`"),
    ))
}

fn check_fresh_algebra(doc: &ModelDocument, tok: &Token<'_>) -> Result<(), ParseError> {
    if doc.algebras.iter().any(|a| a.name() == tok.text) {
        return Err(semantic(
            tok.line,
            tok.col,
            format!("algebra `{}` declared twice", tok.text),
        ));
    }
    Ok(())
}

fn parse_algebra(
    lines: &[Vec<Token<'_>>],
    start: usize,
    doc: &ModelDocument,
) -> Result<(AlgebraBlock, usize), ParseError> {
    let head = &lines[start];
    let opener = head[0];
    if head.len() != 3 {
        return Err(syntax(
            opener.line,
            opener.col,
            "expected `algebra <name> table|free`",
        ));
    }
    let name = expect_identifier(&head[1], "an algebra name")?.to_string();
    check_fresh_algebra(doc, &head[1])?;
    let (body, next) = block_lines(lines, start)?;
    let block = match head[2].text {
        "table" => AlgebraBlock::Table(parse_table(name, body, opener)?),
        "free" => AlgebraBlock::Free(parse_free(name, body, opener)?),
        other => {
            return Err(syntax(
                head[2].line,
                head[2].col,
                format!("expected `table` or `free`, found `{other}`"),
            ))
        }
    };
    Ok((block, next))
}

fn degree_of_expr(expr: &Expr, degrees: &dyn Fn(&str) -> u32) -> Option<u32> {
    let mut result = None;
    for term in expr {
        let d: u32 = term.factors.iter().map(|(n, e)| degrees(n) * e).sum();
        match result {
            None => result = Some(d),
            Some(prev) if prev != d => return None,
            _ => {}
        }
    }
    result
}

fn parse_table(
    name: String,
    body: &[Vec<Token<'_>>],
    opener: Token<'_>,
) -> Result<TableBlock, ParseError> {
    let mut elements: Vec<(String, u32)> = Vec::new();
    let mut unit: Option<(String, u32, Token)> = None;
    let mut products = Vec::new();
    let mut differentials: Vec<(String, Expr)> = Vec::new();

    for tokens in body {
        let key = tokens[0];
        match key.text {
            "element" => {
                if tokens.len() != 3 {
                    return Err(syntax(key.line, key.col, "expected `element <name> <degree>`"));
                }
                let el = expect_identifier(&tokens[1], "an element name")?.to_string();
                if elements.iter().any(|(n, _)| *n == el) {
                    return Err(semantic(
                        tokens[1].line,
                        tokens[1].col,
                        format!("element `{el}` declared twice"),
                    ));
                }
                let deg = parse_u32(&tokens[2], "a degree")?;
                elements.push((el, deg));
            }
            "unit" => {
                if tokens.len() != 2 {
                    return Err(syntax(key.line, key.col, "expected `unit <name>`"));
                }
                let el = expect_identifier(&tokens[1], "an element name")?;
                let Some((_, deg)) = elements.iter().find(|(n, _)| n == el) else {
                    return Err(semantic(
                        tokens[1].line,
                        tokens[1].col,
                        format!("unknown name `{el}`"),
                    ));
                };
                if unit.is_some() {
                    return Err(semantic(key.line, key.col, "unit declared twice"));
                }
                unit = Some((el.to_string(), *deg, tokens[1]));
            }
            "product" => {
                // product A * B = expr
                let eq = find_eq(tokens)
                    .ok_or_else(|| syntax(key.line, key.col, "expected `=` in product line"))?;
                if eq != 4 || tokens[2].text != "*" {
                    return Err(syntax(key.line, key.col, "expected `product <a> * <b> = <expr>`"));
                }
                let declared = |n: &str| elements.iter().any(|(e, _)| e == n);
                let left = expect_identifier(&tokens[1], "an element name")?;
                let right = expect_identifier(&tokens[3], "an element name")?;
                for tok in [&tokens[1], &tokens[3]] {
                    if !declared(tok.text) {
                        return Err(semantic(
                            tok.line,
                            tok.col,
                            format!("unknown name `{}`", tok.text),
                        ));
                    }
                }
                let expr = parse_expr(&tokens[eq + 1..], key.line, key.col, &declared)?;
                for term in &expr {
                    if term.factors.len() != 1 || term.factors[0].1 != 1 {
                        return Err(semantic(
                            key.line,
                            key.col,
                            "table expressions are linear in the declared elements",
                        ));
                    }
                }
                let degree = |n: &str| elements.iter().find(|(e, _)| e == n).unwrap().1;
                let want = degree(left) + degree(right);
                if let Some(got) = degree_of_expr(&expr, &|n| degree(n)) {
                    if got != want {
                        return Err(semantic(
                            key.line,
                            key.col,
                            format!("product of `{left}` and `{right}` must land in degree {want}, found {got}"),
                        ));
                    }
                }
                products.push((left.to_string(), right.to_string(), expr));
            }
            "d" => {
                let eq = find_eq(tokens)
                    .ok_or_else(|| syntax(key.line, key.col, "expected `=` in differential line"))?;
                if eq != 2 {
                    return Err(syntax(key.line, key.col, "expected `d <name> = <expr>`"));
                }
                let el = expect_identifier(&tokens[1], "an element name")?;
                let declared = |n: &str| elements.iter().any(|(e, _)| e == n);
                if !declared(el) {
                    return Err(semantic(
                        tokens[1].line,
                        tokens[1].col,
                        format!("unknown name `{el}`"),
                    ));
                }
                if differentials.iter().any(|(n, _)| n == el) {
                    return Err(semantic(
                        tokens[1].line,
                        tokens[1].col,
                        format!("differential of `{el}` given twice"),
                    ));
                }
                let expr = parse_expr(&tokens[eq + 1..], key.line, key.col, &declared)?;
                let degree = |n: &str| elements.iter().find(|(e, _)| e == n).unwrap().1;
                if let Some(got) = degree_of_expr(&expr, &|n| degree(n)) {
                    if got != degree(el) + 1 {
                        return Err(semantic(
                            key.line,
                            key.col,
                            format!(
                                "d of `{el}` must land in degree {}, found {got}",
                                degree(el) + 1
                            ),
                        ));
                    }
                }
                differentials.push((el.to_string(), expr));
            }
            other => {
                return Err(syntax(
                    key.line,
                    key.col,
                    format!("unexpected `{other}` in a table block"),
                ))
            }
        }
    }

    if elements.is_empty() {
        return Err(semantic(opener.line, opener.col, "a table needs elements"));
    }
    let Some((unit, unit_degree, unit_tok)) = unit else {
        return Err(semantic(opener.line, opener.col, "a table needs a unit"));
    };
    if unit_degree != 0 {
        return Err(semantic(unit_tok.line, unit_tok.col, "the unit must have degree 0"));
    }
    Ok(TableBlock {
        name,
        elements,
        unit,
        products,
        differentials,
    })
}

fn parse_free(
    name: String,
    body: &[Vec<Token<'_>>],
    opener: Token<'_>,
) -> Result<FreeBlock, ParseError> {
    let mut generators: Vec<(String, u32)> = Vec::new();
    let mut differentials: Vec<(String, Expr)> = Vec::new();
    let mut top: Option<u32> = None;

    for tokens in body {
        let key = tokens[0];
        match key.text {
            "generator" => {
                if tokens.len() != 3 {
                    return Err(syntax(
                        key.line,
                        key.col,
                        "expected `generator <name> <degree>`",
                    ));
                }
                let g = expect_identifier(&tokens[1], "a generator name")?.to_string();
                if g.contains('^') {
                    return Err(semantic(
                        tokens[1].line,
                        tokens[1].col,
                        "generator names may not contain `^`",
                    ));
                }
                if generators.iter().any(|(n, _)| *n == g) {
                    return Err(semantic(
                        tokens[1].line,
                        tokens[1].col,
                        format!("generator `{g}` declared twice"),
                    ));
                }
                let deg = parse_u32(&tokens[2], "a degree")?;
                if deg == 0 {
                    return Err(semantic(
                        tokens[2].line,
                        tokens[2].col,
                        "generators must have positive degree",
                    ));
                }
                generators.push((g, deg));
            }
            "d" => {
                let eq = find_eq(tokens)
                    .ok_or_else(|| syntax(key.line, key.col, "expected `=` in differential line"))?;
                if eq != 2 {
                    return Err(syntax(key.line, key.col, "expected `d <name> = <expr>`"));
                }
                let g = expect_identifier(&tokens[1], "a generator name")?;
                let declared = |n: &str| generators.iter().any(|(e, _)| e == n);
                if !declared(g) {
                    return Err(semantic(
                        tokens[1].line,
                        tokens[1].col,
                        format!("unknown name `{g}`"),
                    ));
                }
                if differentials.iter().any(|(n, _)| n == g) {
                    return Err(semantic(
                        tokens[1].line,
                        tokens[1].col,
                        format!("differential of `{g}` given twice"),
                    ));
                }
                let expr = parse_expr(&tokens[eq + 1..], key.line, key.col, &declared)?;
                let degree = |n: &str| generators.iter().find(|(e, _)| e == n).unwrap().1;
                if let Some(got) = degree_of_expr(&expr, &|n| degree(n)) {
                    if got != degree(g) + 1 {
                        return Err(semantic(
                            key.line,
                            key.col,
                            format!("d of `{g}` must land in degree {}, found {got}", degree(g) + 1),
                        ));
                    }
                } else if !expr.is_empty() {
                    return Err(semantic(key.line, key.col, "differential terms have mixed degrees"));
                }
                differentials.push((g.to_string(), expr));
            }
            "top" => {
                if tokens.len() != 2 {
                    return Err(syntax(key.line, key.col, "expected `top <degree>`"));
                }
                if top.is_some() {
                    return Err(semantic(key.line, key.col, "top declared twice"));
                }
                top = Some(parse_u32(&tokens[1], "a degree")?);
            }
            other => {
                return Err(syntax(
                    key.line,
                    key.col,
                    format!("unexpected `{other}` in a free block"),
                ))
            }
        }
    }

    if generators.is_empty() {
        return Err(semantic(opener.line, opener.col, "a free algebra needs generators"));
    }
    let top = top.unwrap_or(16);
    if let Some((g, deg)) = generators.iter().find(|(_, deg)| *deg > top) {
        return Err(semantic(
            opener.line,
            opener.col,
            format!("generator `{g}` of degree {deg} lies above top {top}"),
        ));
    }
    Ok(FreeBlock {
        name,
        generators,
        differentials,
        top,
    })
}

fn parse_morphism(
    lines: &[Vec<Token<'_>>],
    start: usize,
    doc: &ModelDocument,
) -> Result<(MorphismBlock, usize), ParseError> {
    let head = &lines[start];
    let opener = head[0];
    if head.len() != 2 {
        return Err(syntax(opener.line, opener.col, "expected `morphism <name>`"));
    }
    let name = expect_identifier(&head[1], "a morphism name")?.to_string();
    if doc.morphisms.iter().any(|m| m.name == name) {
        return Err(semantic(
            head[1].line,
            head[1].col,
            format!("morphism `{name}` declared twice"),
        ));
    }
    let (body, next) = block_lines(lines, start)?;

    let mut source: Option<(String, Token)> = None;
    let mut target: Option<(String, Token)> = None;
    let mut images: Vec<(String, Expr)> = Vec::new();
    let mut section: Option<String> = None;
    let mut image_lines = Vec::new();

    for tokens in body {
        let key = tokens[0];
        match key.text {
            "source" | "target" => {
                if tokens.len() != 2 {
                    return Err(syntax(key.line, key.col, format!("expected `{} <algebra>`", key.text)));
                }
                let alg = expect_identifier(&tokens[1], "an algebra name")?;
                if !doc.algebras.iter().any(|a| a.name() == alg) {
                    return Err(semantic(
                        tokens[1].line,
                        tokens[1].col,
                        format!("unknown algebra `{alg}`"),
                    ));
                }
                let slot = if key.text == "source" { &mut source } else { &mut target };
                if slot.is_some() {
                    return Err(semantic(key.line, key.col, format!("{} declared twice", key.text)));
                }
                *slot = Some((alg.to_string(), tokens[1]));
            }
            "map" => image_lines.push(tokens),
            "section" => {
                if tokens.len() != 2 {
                    return Err(syntax(key.line, key.col, "expected `section <morphism>`"));
                }
                let s = expect_identifier(&tokens[1], "a morphism name")?;
                if !doc.morphisms.iter().any(|m| m.name == s) {
                    return Err(semantic(
                        tokens[1].line,
                        tokens[1].col,
                        format!("unknown morphism `{s}`"),
                    ));
                }
                if section.is_some() {
                    return Err(semantic(key.line, key.col, "section declared twice"));
                }
                section = Some(s.to_string());
            }
            other => {
                return Err(syntax(
                    key.line,
                    key.col,
                    format!("unexpected `{other}` in a morphism block"),
                ))
            }
        }
    }

    let Some((source, _)) = source else {
        return Err(semantic(opener.line, opener.col, "a morphism needs a source"));
    };
    let Some((target, _)) = target else {
        return Err(semantic(opener.line, opener.col, "a morphism needs a target"));
    };
    let src = doc.algebras.iter().find(|a| a.name() == source).unwrap();
    let tgt = doc.algebras.iter().find(|a| a.name() == target).unwrap();

    for tokens in image_lines {
        let key = tokens[0];
        let eq = find_eq(tokens).ok_or_else(|| syntax(key.line, key.col, "expected `=` in map line"))?;
        if eq != 2 {
            return Err(syntax(key.line, key.col, "expected `map <name> = <expr>`"));
        }
        let lhs = expect_identifier(&tokens[1], "a source name")?;
        let (lhs_known, lhs_degree) = match src {
            AlgebraBlock::Table(t) => match t.elements.iter().find(|(n, _)| n == lhs) {
                Some((_, d)) => (true, *d),
                None => (false, 0),
            },
            AlgebraBlock::Free(f) => match f.generators.iter().find(|(n, _)| n == lhs) {
                Some((_, d)) => (true, *d),
                None => (false, 0),
            },
        };
        if !lhs_known {
            return Err(semantic(
                tokens[1].line,
                tokens[1].col,
                format!("`{lhs}` is not a {} of `{source}`", if src.is_free() { "generator" } else { "basis element" }),
            ));
        }
        if images.iter().any(|(n, _)| n == lhs) {
            return Err(semantic(
                tokens[1].line,
                tokens[1].col,
                format!("image of `{lhs}` given twice"),
            ));
        }
        let declared: Box<dyn Fn(&str) -> bool> = match tgt {
            AlgebraBlock::Table(t) => {
                let names: Vec<String> = t.elements.iter().map(|(n, _)| n.clone()).collect();
                Box::new(move |n: &str| names.iter().any(|e| e == n))
            }
            AlgebraBlock::Free(f) => {
                let names: Vec<String> = f.generators.iter().map(|(n, _)| n.clone()).collect();
                Box::new(move |n: &str| names.iter().any(|e| e == n))
            }
        };
        let expr = parse_expr(&tokens[eq + 1..], key.line, key.col, &declared)?;
        let tgt_degree: Box<dyn Fn(&str) -> u32> = match tgt {
            AlgebraBlock::Table(t) => {
                let els = t.elements.clone();
                Box::new(move |n: &str| els.iter().find(|(e, _)| e == n).unwrap().1)
            }
            AlgebraBlock::Free(f) => {
                let els = f.generators.clone();
                Box::new(move |n: &str| els.iter().find(|(e, _)| e == n).unwrap().1)
            }
        };
        if let Some(got) = degree_of_expr(&expr, &tgt_degree) {
            if got != lhs_degree {
                return Err(semantic(
                    key.line,
                    key.col,
                    format!("image of `{lhs}` must have degree {lhs_degree}, found {got}"),
                ));
            }
        }
        images.push((lhs.to_string(), expr));
    }

    Ok((
        MorphismBlock {
            name,
            source,
            target,
            images,
            section,
        },
        next,
    ))
}

fn parse_metadata(
    lines: &[Vec<Token<'_>>],
    start: usize,
    meta: &mut Metadata,
) -> Result<usize, ParseError> {
    let (body, next) = block_lines(lines, start)?;
    for tokens in body {
        let key = tokens[0];
        match key.text {
            "name" => {
                if tokens.len() != 2 {
                    return Err(syntax(key.line, key.col, "expected `name <identifier>`"));
                }
                meta.name = Some(expect_identifier(&tokens[1], "a name")?.to_string());
            }
            "formal" | "simply-connected" => {
                if tokens.len() != 2 {
                    return Err(syntax(key.line, key.col, format!("expected `{} true|false`", key.text)));
                }
                let value = match tokens[1].text {
                    "true" => true,
                    "false" => false,
                    other => {
                        return Err(syntax(
                            tokens[1].line,
                            tokens[1].col,
                            format!("expected `true` or `false`, found `{other}`"),
                        ))
                    }
                };
                if key.text == "formal" {
                    meta.formal = value;
                } else {
                    meta.simply_connected = Some(value);
                }
            }
            other => {
                return Err(syntax(
                    key.line,
                    key.col,
                    format!("unexpected `{other}` in a metadata block"),
                ))
            }
        }
    }
    Ok(next)
}

pub fn render_expr(expr: &Expr) -> String {
    if expr.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, term) in expr.iter().enumerate() {
        let negative = term.coeff < scalar::zero();
        let magnitude = if negative { -term.coeff.clone() } else { term.coeff.clone() };
        if i == 0 {
            if negative {
                out.push_str("- ");
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        if magnitude != scalar::one() {
            out.push_str(&scalar::render(&magnitude));
            out.push(' ');
        }
        let rendered: Vec<String> = term
            .factors
            .iter()
            .map(|(name, exp)| {
                if *exp == 1 {
                    name.clone()
                } else {
                    format!("{name}^{exp}")
                }
            })
            .collect();
        out.push_str(&rendered.join(" * "));
    }
    out
}

/// Canonical text for a document; `parse_model` of the result reproduces
/// the document exactly.
pub fn serialize(doc: &ModelDocument) -> String {
    let mut out = String::new();
    let mut first = true;
    let mut sep = |out: &mut String| {
        if !first {
            out.push('\n');
        }
        first = false;
    };

    for block in &doc.algebras {
        sep(&mut out);
        match block {
            AlgebraBlock::Table(t) => {
                out.push_str(&format!("algebra {} table\n", t.name));
                for (name, deg) in &t.elements {
                    out.push_str(&format!("  element {name} {deg}\n"));
                }
                out.push_str(&format!("  unit {}\n", t.unit));
                for (a, b, expr) in &t.products {
                    out.push_str(&format!("  product {a} * {b} = {}\n", render_expr(expr)));
                }
                for (el, expr) in &t.differentials {
                    out.push_str(&format!("  d {el} = {}\n", render_expr(expr)));
                }
            }
            AlgebraBlock::Free(f) => {
                out.push_str(&format!("algebra {} free\n", f.name));
                for (name, deg) in &f.generators {
                    out.push_str(&format!("  generator {name} {deg}\n"));
                }
                for (g, expr) in &f.differentials {
                    out.push_str(&format!("  d {g} = {}\n", render_expr(expr)));
                }
                out.push_str(&format!("  top {}\n", f.top));
            }
        }
        out.push_str("end\n");
    }

    for m in &doc.morphisms {
        sep(&mut out);
        out.push_str(&format!("morphism {}\n", m.name));
        out.push_str(&format!("  source {}\n", m.source));
        out.push_str(&format!("  target {}\n", m.target));
        for (lhs, expr) in &m.images {
            out.push_str(&format!("  map {lhs} = {}\n", render_expr(expr)));
        }
        if let Some(s) = &m.section {
            out.push_str(&format!("  section {s}\n"));
        }
        out.push_str("end\n");
    }

    let meta = &doc.metadata;
    if meta.name.is_some() || meta.formal || meta.simply_connected.is_some() {
        sep(&mut out);
        out.push_str("metadata\n");
        if let Some(name) = &meta.name {
            out.push_str(&format!("  name {name}\n"));
        }
        if meta.formal {
            out.push_str("  formal true\n");
        }
        if let Some(sc) = meta.simply_connected {
            out.push_str(&format!("  simply-connected {sc}\n"));
        }
        out.push_str("end\n");
    }

    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# the projective plane and a free model side by side
algebra cp2 table
  element 1 0
  element x 2
  element x^2 4
  unit 1
  product x * x = x^2
end

algebra model free
  generator x 2
  generator y 3
  d y = x^2
  top 12
end

morphism collapse
  source model
  target cp2
  map x = x
end

metadata
  name cp2
  formal true
end
";

    #[test]
    fn sample_round_trips() {
        let doc = parse_model(SAMPLE).unwrap();
        assert_eq!(doc.algebras.len(), 2);
        assert_eq!(doc.morphisms.len(), 1);
        assert_eq!(doc.metadata.name.as_deref(), Some("cp2"));
        assert!(doc.metadata.formal);

        let text = serialize(&doc);
        let again = parse_model(&text).unwrap();
        assert_eq!(doc, again);
        // A second round must be textually stable too.
        assert_eq!(text, serialize(&again));
    }

    #[test]
    fn power_token_prefers_a_declared_name() {
        let doc = parse_model(SAMPLE).unwrap();
        let AlgebraBlock::Table(t) = &doc.algebras[0] else {
            panic!()
        };
        // In the table, x^2 is an opaque element name.
        assert_eq!(t.products[0].2[0].factors, vec![("x^2".to_string(), 1)]);
        let AlgebraBlock::Free(f) = &doc.algebras[1] else {
            panic!()
        };
        // In the free algebra, the same token is a square.
        assert_eq!(f.differentials[0].1[0].factors, vec![("x".to_string(), 2)]);
    }

    #[test]
    fn syntax_errors_carry_position() {
        let bad = "algebra a table\n  element 1 0\n  unit 1\n  element x two\nend\n";
        let err = parse_model(bad).unwrap_err();
        let ParseError::Syntax(d) = err else {
            panic!("expected a syntax error")
        };
        assert_eq!((d.line, d.col), (4, 13));
        assert!(d.message.contains("degree"));
    }

    #[test]
    fn unknown_names_are_semantic_errors() {
        let bad = "algebra a table\n  element 1 0\n  element x 2\n  unit 1\n  d x = q\nend\n";
        let err = parse_model(bad).unwrap_err();
        assert!(matches!(err, ParseError::Semantic(_)));
        assert!(err.to_string().contains("unknown name `q`"));
    }

    #[test]
    fn wrong_differential_degree_is_reported_with_the_culprit() {
        let bad = "algebra a free\n  generator x 2\n  generator y 4\n  d y = x\nend\n";
        let err = parse_model(bad).unwrap_err();
        let ParseError::Semantic(d) = err else {
            panic!("expected a semantic error")
        };
        assert!(d.message.contains("`y`"), "{}", d.message);
        assert!(d.message.contains("degree 5"), "{}", d.message);
    }

    #[test]
    fn negative_and_fractional_coefficients_round_trip() {
        let text = "algebra a free\n  generator u 1\n  generator v 1\n  generator w 1\n  d w = - u * v + 1/2 v * w\n  top 4\nend\n";
        let doc = parse_model(text).unwrap();
        let AlgebraBlock::Free(f) = &doc.algebras[0] else {
            panic!()
        };
        let expr = &f.differentials[0].1;
        assert_eq!(expr.len(), 2);
        assert_eq!(expr[0].coeff, ratho::scalar::int(-1));
        assert_eq!(expr[1].coeff, ratho::scalar::frac(1, 2));
        let again = parse_model(&serialize(&doc)).unwrap();
        assert_eq!(doc, again);
    }

    #[test]
    fn zero_expressions_serialize_back_to_zero() {
        let text = "algebra a table\n  element 1 0\n  element x 3\n  unit 1\n  product x * x = 0\nend\n";
        let doc = parse_model(text).unwrap();
        let again = parse_model(&serialize(&doc)).unwrap();
        assert_eq!(doc, again);
    }
}
