//! Line-oriented circuit language.
//!
//! ```text
//! trap wa=7 wb=5 wc=4 eta=0.05 N=15 Omega=1
//! prep qubit x+
//! gate D a alpha=0.1+0.05i
//! gate BS a b theta=pi/4 phase=0
//! measure wigner a xmin=-3 xmax=3 n=61
//! ```

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use num_complex::Complex64 as C;
use trapcv_core::gates::GateParams;
use trapcv_core::numfmt;
use trapcv_core::{Mode, QubitPrep, Sign, TrapSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnknownGate,
    Arity,
    UndeclaredMode,
    IdenticalModes,
    MissingTrap,
    DuplicateTrap,
    InvalidValue,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
    pub message: String,
}

fn err<T>(line: usize, col: usize, kind: ParseErrorKind, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        col,
        kind,
        message: message.into(),
    })
}

/// Trap declaration; Omega is the gate rate used when compiling.
#[derive(Clone, Debug, PartialEq)]
pub struct TrapDecl {
    pub trap: TrapSpec,
    pub omega: Option<f64>,
    pub guard: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum GateOp {
    D { mode: Mode, alpha: C },
    S { mode: Mode, xi: C },
    F { mode: Mode, theta: f64 },
    Bs { a: Mode, b: Mode, theta: f64, phase: f64 },
    Tms { a: Mode, b: Mode, zeta: C },
    /// exp(−i s x_a p_b)
    Cx { a: Mode, b: Mode, s: f64 },
    Blue { mode: Mode, area: f64, phase: f64 },
    Red { mode: Mode, area: f64, phase: f64 },
}

impl GateOp {
    pub fn name(&self) -> &'static str {
        match self {
            GateOp::D { .. } => "D",
            GateOp::S { .. } => "S",
            GateOp::F { .. } => "F",
            GateOp::Bs { .. } => "BS",
            GateOp::Tms { .. } => "TMS",
            GateOp::Cx { .. } => "CX",
            GateOp::Blue { .. } => "BLUE",
            GateOp::Red { .. } => "RED",
        }
    }

    pub fn modes(&self) -> Vec<Mode> {
        match *self {
            GateOp::D { mode, .. }
            | GateOp::S { mode, .. }
            | GateOp::F { mode, .. }
            | GateOp::Blue { mode, .. }
            | GateOp::Red { mode, .. } => vec![mode],
            GateOp::Bs { a, b, .. } | GateOp::Tms { a, b, .. } | GateOp::Cx { a, b, .. } => vec![a, b],
        }
    }

    /// Ideal gate requested by the statement.
    pub fn params(&self) -> GateParams {
        match *self {
            GateOp::D { mode, alpha } => GateParams::Displacement { mode, alpha },
            GateOp::S { mode, xi } => GateParams::Squeezer { mode, xi },
            GateOp::F { mode, theta } => GateParams::Fourier {
                modes: vec![mode],
                thetas: vec![theta],
            },
            GateOp::Bs { a, b, theta, phase } => GateParams::BeamSplitter {
                a,
                b,
                mix_angle: theta,
                mix_phase: phase,
            },
            GateOp::Tms { a, b, zeta } => GateParams::Tms { a, b, zeta },
            GateOp::Cx { a, b, s } => GateParams::controlled_displacement(s, a, b),
            GateOp::Blue { mode, area, phase } => GateParams::Blue { mode, area, phase },
            GateOp::Red { mode, area, phase } => GateParams::Red { mode, area, phase },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MeasureOp {
    Wigner {
        mode: Mode,
        xmin: Option<f64>,
        xmax: Option<f64>,
        n: Option<usize>,
    },
    Rabi {
        t_max: Option<f64>,
        dt: Option<f64>,
        cap: Option<usize>,
        noise: Option<f64>,
    },
    Parity {
        m: Option<u32>,
        omega0: Option<f64>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum StatementKind {
    Prep(QubitPrep),
    Gate(GateOp),
    Measure(MeasureOp),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Statement {
    pub line: usize,
    pub kind: StatementKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CircuitProgram {
    pub trap_decl: TrapDecl,
    pub statements: Vec<Statement>,
}

impl CircuitProgram {
    pub fn gates(&self) -> impl Iterator<Item = &GateOp> {
        self.statements.iter().filter_map(|s| match &s.kind {
            StatementKind::Gate(g) => Some(g),
            _ => None,
        })
    }

    pub fn measures(&self) -> impl Iterator<Item = &MeasureOp> {
        self.statements.iter().filter_map(|s| match &s.kind {
            StatementKind::Measure(m) => Some(m),
            _ => None,
        })
    }
}

#[derive(Clone, Copy, Debug)]
struct Token<'a> {
    text: &'a str,
    col: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let code = match line.find('#') {
        Some(k) => &line[..k],
        None => line,
    };
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, ch) in code.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, i));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, code.len()));
    }
    out.into_iter()
        .map(|(s, e)| Token {
            text: &code[s..e],
            col: code[..s].chars().count() + 1,
        })
        .collect()
}

fn parse_factor(s: &str) -> Option<f64> {
    if s == "pi" {
        return Some(PI);
    }
    // rust float syntax accepts inf/nan, which the language does not
    if !s.bytes().all(|b| b.is_ascii_digit() || matches!(b, b'.' | b'e' | b'E' | b'+' | b'-')) {
        return None;
    }
    s.parse::<f64>().ok().filter(|x| x.is_finite())
}

/// Decimal float or a product/quotient with `pi`, e.g. `-pi/4`, `2*pi`.
pub fn parse_real(s: &str) -> Option<f64> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) if rest.starts_with("pi") => (true, rest),
        _ => (false, s),
    };
    let mut value = None;
    let mut op = '*';
    let mut rest = body;
    loop {
        let cut = rest.find(['*', '/']).unwrap_or(rest.len());
        let f = parse_factor(&rest[..cut])?;
        value = Some(match (value, op) {
            (None, _) => f,
            (Some(v), '*') => v * f,
            (Some(v), _) => v / f,
        });
        if cut == rest.len() {
            break;
        }
        op = rest.as_bytes()[cut] as char;
        rest = &rest[cut + 1..];
    }
    let v = value?;
    let v = if neg { -v } else { v };
    v.is_finite().then_some(v)
}

/// `a`, `bi`, `a+bi` or `a-bi`.
pub fn parse_complex(s: &str) -> Option<C> {
    let Some(body) = s.strip_suffix('i') else {
        return parse_real(s).map(|re| C::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E' | b'*' | b'/'));
    let imag = |t: &str| match t {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        _ => parse_real(t.strip_prefix('+').unwrap_or(t)),
    };
    match split {
        None => imag(body).map(|im| C::new(0.0, im)),
        Some(k) => Some(C::new(parse_real(&body[..k])?, imag(&body[k..])?)),
    }
}

struct Params<'a> {
    line: usize,
    items: Vec<(&'a str, &'a str, usize)>,
    used: Vec<bool>,
}

impl<'a> Params<'a> {
    fn new(line: usize, tokens: &[Token<'a>]) -> Result<Self, ParseError> {
        let mut items: Vec<(&str, &str, usize)> = Vec::new();
        for t in tokens {
            let Some((k, v)) = t.text.split_once('=') else {
                return err(line, t.col, ParseErrorKind::Syntax, format!("expected key=value, found '{}'", t.text));
            };
            if k.is_empty() || v.is_empty() {
                return err(line, t.col, ParseErrorKind::Syntax, format!("malformed parameter '{}'", t.text));
            }
            if items.iter().any(|(k2, _, _)| *k2 == k) {
                return err(line, t.col, ParseErrorKind::Syntax, format!("duplicate parameter '{k}'"));
            }
            items.push((k, v, t.col + k.chars().count() + 1));
        }
        let used = vec![false; items.len()];
        Ok(Params { line, items, used })
    }

    fn take(&mut self, key: &str) -> Option<(&'a str, usize)> {
        let k = self.items.iter().position(|(k, _, _)| *k == key)?;
        self.used[k] = true;
        Some((self.items[k].1, self.items[k].2))
    }

    fn real(&mut self, key: &str) -> Result<Option<f64>, ParseError> {
        match self.take(key) {
            None => Ok(None),
            Some((v, col)) => match parse_real(v) {
                Some(x) => Ok(Some(x)),
                None => err(self.line, col, ParseErrorKind::InvalidValue, format!("'{v}' is not a number")),
            },
        }
    }

    fn complex(&mut self, key: &str) -> Result<Option<C>, ParseError> {
        match self.take(key) {
            None => Ok(None),
            Some((v, col)) => match parse_complex(v) {
                Some(x) => Ok(Some(x)),
                None => err(self.line, col, ParseErrorKind::InvalidValue, format!("'{v}' is not a complex number")),
            },
        }
    }

    fn count(&mut self, key: &str) -> Result<Option<usize>, ParseError> {
        match self.take(key) {
            None => Ok(None),
            Some((v, col)) => match v.parse::<usize>() {
                Ok(x) => Ok(Some(x)),
                Err(_) => err(self.line, col, ParseErrorKind::InvalidValue, format!("'{v}' is not a nonnegative integer")),
            },
        }
    }

    fn required<T>(&self, key: &str, v: Option<T>, col: usize) -> Result<T, ParseError> {
        match v {
            Some(x) => Ok(x),
            None => err(self.line, col, ParseErrorKind::Arity, format!("missing parameter '{key}'")),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.used.iter().position(|u| !u) {
            None => Ok(()),
            Some(k) => {
                let (key, _, col) = self.items[k];
                err(
                    self.line,
                    col - key.chars().count() - 1,
                    ParseErrorKind::Arity,
                    format!("unexpected parameter '{key}'"),
                )
            }
        }
    }
}

fn parse_trap(line: usize, tokens: &[Token]) -> Result<TrapDecl, ParseError> {
    let mut p = Params::new(line, &tokens[1..])?;
    let kw = tokens[0].col;
    let freqs: Vec<Option<f64>> = ["wa", "wb", "wc"].iter().map(|k| p.real(k)).collect::<Result<_, _>>()?;
    let n_modes = freqs.iter().take_while(|f| f.is_some()).count();
    if n_modes == 0 || freqs[n_modes..].iter().any(|f| f.is_some()) {
        return err(line, kw, ParseErrorKind::Syntax, "mode frequencies must be given as wa[, wb[, wc]]");
    }
    let freqs: Vec<f64> = freqs.into_iter().flatten().collect();
    let uniform = p.real("eta")?;
    let per_mode: Vec<Option<f64>> = ["eta_a", "eta_b", "eta_c"].iter().map(|k| p.real(k)).collect::<Result<_, _>>()?;
    let eta = match uniform {
        Some(e) if per_mode.iter().all(|x| x.is_none()) => vec![e; n_modes],
        Some(_) => return err(line, kw, ParseErrorKind::Syntax, "give either eta or eta_a/eta_b/eta_c, not both"),
        None => {
            if per_mode[n_modes..].iter().any(|x| x.is_some()) {
                return err(line, kw, ParseErrorKind::UndeclaredMode, "Lamb-Dicke parameter for an undeclared mode");
            }
            match per_mode[..n_modes].iter().copied().collect::<Option<Vec<f64>>>() {
                Some(v) => v,
                None => return err(line, kw, ParseErrorKind::Arity, "missing Lamb-Dicke parameter (eta or eta_a...)"),
            }
        }
    };
    let n = p.count("N")?;
    let n = p.required("N", n, kw)?;
    let omega = p.real("Omega")?;
    if let Some(w) = omega {
        if w <= 0.0 {
            return err(line, kw, ParseErrorKind::InvalidValue, format!("Omega must be positive, got {w}"));
        }
    }
    let guard = p.count("guard")?;
    p.finish()?;
    match TrapSpec::new(freqs, eta, n) {
        Ok(trap) => Ok(TrapDecl { trap, omega, guard }),
        Err(e) => err(line, kw, ParseErrorKind::InvalidValue, e.to_string()),
    }
}

fn parse_mode(line: usize, t: &Token) -> Result<Mode, ParseError> {
    match Mode::parse(t.text) {
        Some(m) => Ok(m),
        None => err(line, t.col, ParseErrorKind::Syntax, format!("'{}' is not a mode (a, b or c)", t.text)),
    }
}

fn parse_prep(line: usize, tokens: &[Token]) -> Result<QubitPrep, ParseError> {
    if tokens.len() != 3 || tokens[1].text != "qubit" {
        let col = tokens.get(1).map_or(tokens[0].col, |t| t.col);
        return err(line, col, ParseErrorKind::Syntax, "expected 'prep qubit <axis><sign>'");
    }
    let t = tokens[2];
    let (axis, sign) = t.text.split_at(t.text.len() - t.text.chars().last().map_or(0, |c| c.len_utf8()));
    let sign = match sign {
        "+" => Sign::Plus,
        "-" => Sign::Minus,
        _ => return err(line, t.col, ParseErrorKind::Syntax, "qubit axis must end in + or -"),
    };
    let axis = match axis {
        "x" => 0.0,
        "y" => FRAC_PI_2,
        other => match parse_real(other) {
            Some(a) => a,
            None => return err(line, t.col, ParseErrorKind::InvalidValue, format!("'{other}' is not an axis (x, y or an angle)")),
        },
    };
    Ok(QubitPrep::new(axis, sign))
}

fn parse_gate(line: usize, tokens: &[Token]) -> Result<GateOp, ParseError> {
    let Some(name) = tokens.get(1) else {
        return err(line, tokens[0].col, ParseErrorKind::Syntax, "missing gate name");
    };
    let arity = match name.text {
        "D" | "S" | "F" | "BLUE" | "RED" => 1,
        "BS" | "TMS" | "CX" => 2,
        other => return err(line, name.col, ParseErrorKind::UnknownGate, format!("unknown gate '{other}'")),
    };
    let rest = &tokens[2..];
    let n_modes = rest.iter().take_while(|t| !t.text.contains('=')).count();
    if n_modes != arity {
        let col = rest.get(n_modes.min(arity)).map_or(name.col, |t| t.col);
        return err(
            line,
            col,
            ParseErrorKind::Arity,
            format!("gate {} takes {arity} mode(s), got {n_modes}", name.text),
        );
    }
    let modes: Vec<Mode> = rest[..n_modes].iter().map(|t| parse_mode(line, t)).collect::<Result<_, _>>()?;
    if arity == 2 && modes[0] == modes[1] {
        return err(line, rest[1].col, ParseErrorKind::IdenticalModes, "identical modes");
    }
    let mut p = Params::new(line, &rest[n_modes..])?;
    let c = name.col;
    let g = match name.text {
        "D" => {
            let alpha = p.complex("alpha")?;
            GateOp::D { mode: modes[0], alpha: p.required("alpha", alpha, c)? }
        }
        "S" => {
            let xi = p.complex("xi")?;
            GateOp::S { mode: modes[0], xi: p.required("xi", xi, c)? }
        }
        "F" => {
            let theta = p.real("theta")?;
            GateOp::F { mode: modes[0], theta: p.required("theta", theta, c)? }
        }
        "BS" => {
            let theta = p.real("theta")?;
            let theta = p.required("theta", theta, c)?;
            GateOp::Bs { a: modes[0], b: modes[1], theta, phase: p.real("phase")?.unwrap_or(0.0) }
        }
        "TMS" => {
            let zeta = p.complex("zeta")?;
            GateOp::Tms { a: modes[0], b: modes[1], zeta: p.required("zeta", zeta, c)? }
        }
        "CX" => {
            let s = p.real("s")?;
            GateOp::Cx { a: modes[0], b: modes[1], s: p.required("s", s, c)? }
        }
        blue_or_red => {
            let area = p.real("area")?;
            let area = p.required("area", area, c)?;
            let phase = p.real("phase")?.unwrap_or(0.0);
            if blue_or_red == "BLUE" {
                GateOp::Blue { mode: modes[0], area, phase }
            } else {
                GateOp::Red { mode: modes[0], area, phase }
            }
        }
    };
    p.finish()?;
    Ok(g)
}

fn parse_measure(line: usize, tokens: &[Token]) -> Result<MeasureOp, ParseError> {
    let Some(what) = tokens.get(1) else {
        return err(line, tokens[0].col, ParseErrorKind::Syntax, "missing measurement kind");
    };
    let m = match what.text {
        "wigner" => {
            let Some(mt) = tokens.get(2).filter(|t| !t.text.contains('=')) else {
                return err(line, what.col, ParseErrorKind::Arity, "wigner measurement needs a mode");
            };
            let mode = parse_mode(line, mt)?;
            let mut p = Params::new(line, &tokens[3..])?;
            let m = MeasureOp::Wigner {
                mode,
                xmin: p.real("xmin")?,
                xmax: p.real("xmax")?,
                n: p.count("n")?,
            };
            p.finish()?;
            m
        }
        "rabi" => {
            let mut p = Params::new(line, &tokens[2..])?;
            let m = MeasureOp::Rabi {
                t_max: p.real("T")?,
                dt: p.real("dt")?,
                cap: p.count("cap")?,
                noise: p.real("noise")?,
            };
            p.finish()?;
            m
        }
        "parity" => {
            let mut p = Params::new(line, &tokens[2..])?;
            let m = match p.count("m")? {
                Some(m) if m > u32::MAX as usize => {
                    return err(line, what.col, ParseErrorKind::InvalidValue, "m is too large");
                }
                m => MeasureOp::Parity {
                    m: m.map(|m| m as u32),
                    omega0: p.real("Omega0")?,
                },
            };
            p.finish()?;
            m
        }
        other => {
            return err(line, what.col, ParseErrorKind::Syntax, format!("unknown measurement '{other}'"));
        }
    };
    Ok(m)
}

enum Parsed {
    Trap(TrapDecl),
    Stmt(StatementKind),
}

fn parse_line(line: usize, tokens: &[Token]) -> Result<Parsed, ParseError> {
    let head = tokens[0];
    match head.text {
        "trap" => parse_trap(line, tokens).map(Parsed::Trap),
        "prep" => parse_prep(line, tokens).map(|p| Parsed::Stmt(StatementKind::Prep(p))),
        "gate" => parse_gate(line, tokens).map(|g| Parsed::Stmt(StatementKind::Gate(g))),
        "measure" => parse_measure(line, tokens).map(|m| Parsed::Stmt(StatementKind::Measure(m))),
        other => err(line, head.col, ParseErrorKind::Syntax, format!("unknown statement '{other}'")),
    }
}

fn mode_columns(tokens: &[Token], kind: &StatementKind) -> Vec<(Mode, usize)> {
    let modes = match kind {
        StatementKind::Gate(g) => g.modes(),
        StatementKind::Measure(MeasureOp::Wigner { mode, .. }) => vec![*mode],
        _ => vec![],
    };
    // mode tokens follow the two leading keywords
    modes.into_iter().zip(tokens.iter().skip(2).map(|t| t.col)).collect()
}

pub fn parse_program(text: &str) -> Result<CircuitProgram, ParseError> {
    let mut trap: Option<TrapDecl> = None;
    let mut statements = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let tokens = tokenize(raw);
        if tokens.is_empty() {
            continue;
        }
        match parse_line(line, &tokens)? {
            Parsed::Trap(t) => {
                if trap.is_some() {
                    return err(line, tokens[0].col, ParseErrorKind::DuplicateTrap, "duplicate trap declaration");
                }
                trap = Some(t);
            }
            Parsed::Stmt(kind) => {
                let Some(decl) = &trap else {
                    return err(line, tokens[0].col, ParseErrorKind::MissingTrap, "missing trap declaration");
                };
                for (m, col) in mode_columns(&tokens, &kind) {
                    if !decl.trap.has_mode(m) {
                        return err(line, col, ParseErrorKind::UndeclaredMode, format!("mode {m} is not declared"));
                    }
                }
                statements.push(Statement { line, kind });
            }
        }
    }
    match trap {
        Some(trap_decl) => Ok(CircuitProgram { trap_decl, statements }),
        None => err(1, 1, ParseErrorKind::MissingTrap, "missing trap declaration"),
    }
}

fn cfmt(z: C) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{sign}{}i", numfmt::float(z.re), numfmt::float(z.im.abs()))
}

fn opt<T: fmt::Display>(f: &mut fmt::Formatter<'_>, key: &str, v: Option<T>) -> fmt::Result {
    match v {
        Some(v) => write!(f, " {key}={v}"),
        None => Ok(()),
    }
}

impl fmt::Display for CircuitProgram {
    /// Canonical text: parsing it gives back an equal program.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = &self.trap_decl;
        write!(f, "trap")?;
        for (m, w) in d.trap.modes().zip(d.trap.mode_freqs()) {
            write!(f, " w{m}={}", numfmt::float(*w))?;
        }
        for (m, e) in d.trap.modes().zip(d.trap.lamb_dicke()) {
            write!(f, " eta_{m}={}", numfmt::float(*e))?;
        }
        write!(f, " N={}", d.trap.truncation())?;
        opt(f, "Omega", d.omega.map(numfmt::float))?;
        opt(f, "guard", d.guard)?;
        writeln!(f)?;
        for s in &self.statements {
            match &s.kind {
                StatementKind::Prep(p) => writeln!(f, "prep qubit {}{}", numfmt::float(p.axis), p.sign.symbol())?,
                StatementKind::Gate(g) => {
                    write!(f, "gate {}", g.name())?;
                    for m in g.modes() {
                        write!(f, " {m}")?;
                    }
                    match *g {
                        GateOp::D { alpha, .. } => write!(f, " alpha={}", cfmt(alpha))?,
                        GateOp::S { xi, .. } => write!(f, " xi={}", cfmt(xi))?,
                        GateOp::F { theta, .. } => write!(f, " theta={}", numfmt::float(theta))?,
                        GateOp::Bs { theta, phase, .. } => {
                            write!(f, " theta={} phase={}", numfmt::float(theta), numfmt::float(phase))?
                        }
                        GateOp::Tms { zeta, .. } => write!(f, " zeta={}", cfmt(zeta))?,
                        GateOp::Cx { s, .. } => write!(f, " s={}", numfmt::float(s))?,
                        GateOp::Blue { area, phase, .. } | GateOp::Red { area, phase, .. } => {
                            write!(f, " area={} phase={}", numfmt::float(area), numfmt::float(phase))?
                        }
                    }
                    writeln!(f)?;
                }
                StatementKind::Measure(m) => {
                    match *m {
                        MeasureOp::Wigner { mode, xmin, xmax, n } => {
                            write!(f, "measure wigner {mode}")?;
                            opt(f, "xmin", xmin.map(numfmt::float))?;
                            opt(f, "xmax", xmax.map(numfmt::float))?;
                            opt(f, "n", n)?;
                        }
                        MeasureOp::Rabi { t_max, dt, cap, noise } => {
                            write!(f, "measure rabi")?;
                            opt(f, "T", t_max.map(numfmt::float))?;
                            opt(f, "dt", dt.map(numfmt::float))?;
                            opt(f, "cap", cap)?;
                            opt(f, "noise", noise.map(numfmt::float))?;
                        }
                        MeasureOp::Parity { m, omega0 } => {
                            write!(f, "measure parity")?;
                            opt(f, "m", m)?;
                            opt(f, "Omega0", omega0.map(numfmt::float))?;
                        }
                    }
                    writeln!(f)?;
                }
            }
        }
        Ok(())
    }
}
