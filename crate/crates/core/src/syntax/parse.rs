//! Recursive-descent parser for the ASCII formula syntax.
//!
//! ```text
//! iff   := imp ("<->" imp)*
//! imp   := or ("->" imp)?
//! or    := and ("|" and)*
//! and   := unary ("&" unary)*
//! unary := "~" unary | OP group unary | "<K" group ">" unary | "<B" group ">" unary
//!        | "[share" group "]" unary | atom | "(" iff ")"
//! OP    := Box | Dia | Forall | Exists | K | B
//! group := "{" id ("," id)* "}" | "{A}"
//! ```

use super::formula::{Formula, Group};
use crate::error::{Error, Result};

pub fn parse(text: &str) -> Result<Formula> {
    if let Some(pos) = text.find(|c: char| !c.is_ascii()) {
        return Err(Error::Parse { pos, msg: "non-ASCII character".into() });
    }
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let f = p.iff()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(f)
}

/// Parses a standalone group literal such as `{a,b}` or `{A}`.
pub fn parse_group(text: &str) -> Result<Group> {
    let mut p = Parser { src: text.trim().as_bytes(), pos: 0 };
    let g = p.group()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input after group"));
    }
    Ok(g)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn rest(&self) -> &[u8] {
        &self.src[self.pos..]
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{tok}`")))
        }
    }

    fn iff(&mut self) -> Result<Formula> {
        let mut f = self.imp()?;
        while self.eat("<->") {
            let g = self.imp()?;
            f = Formula::iff(f, g);
        }
        Ok(f)
    }

    fn imp(&mut self) -> Result<Formula> {
        let f = self.or()?;
        self.skip_ws();
        if self.rest().starts_with(b"->") {
            self.pos += 2;
            let g = self.imp()?;
            return Ok(Formula::implies(f, g));
        }
        Ok(f)
    }

    fn or(&mut self) -> Result<Formula> {
        let mut f = self.and()?;
        while self.eat("|") {
            let g = self.and()?;
            f = Formula::or(f, g);
        }
        Ok(f)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut f = self.unary()?;
        while self.eat("&") {
            let g = self.unary()?;
            f = Formula::and(f, g);
        }
        Ok(f)
    }

    fn word(&mut self) -> &str {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).expect("ascii")
    }

    fn unary(&mut self) -> Result<Formula> {
        self.skip_ws();
        let start = self.pos;
        let Some(&c) = self.src.get(self.pos) else {
            return Err(self.error("unexpected end of input"));
        };
        match c {
            b'~' => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            b'(' => {
                self.pos += 1;
                let f = self.iff()?;
                self.expect(")")?;
                Ok(f)
            }
            b'[' => {
                self.pos += 1;
                self.skip_ws();
                if self.word() != "share" {
                    self.pos = start;
                    return Err(self.error("expected `[share{..}]`"));
                }
                let g = self.group()?;
                self.expect("]")?;
                Ok(Formula::share(g, self.unary()?))
            }
            b'<' if !self.rest().starts_with(b"<->") => {
                self.pos += 1;
                let kind = self.word().to_string();
                let g = self.group()?;
                self.expect(">")?;
                let f = self.unary()?;
                match kind.as_str() {
                    "K" => Ok(Formula::k_dual(g, f)),
                    "B" => Ok(Formula::b_dual(g, f)),
                    _ => {
                        self.pos = start;
                        Err(self.error("expected `<K{..}>` or `<B{..}>`"))
                    }
                }
            }
            b'a'..=b'z' => {
                let w = self.word().to_string();
                Ok(Formula::Atom(w))
            }
            b'A'..=b'Z' => {
                let w = self.word().to_string();
                let build: fn(Group, Formula) -> Formula = match w.as_str() {
                    "Box" => Formula::boxed,
                    "Dia" => Formula::dia,
                    "Forall" => Formula::forall,
                    "Exists" => Formula::exists,
                    "K" => Formula::k,
                    "B" => Formula::b,
                    _ => {
                        self.pos = start;
                        return Err(self.error(&format!("unknown operator `{w}`")));
                    }
                };
                let g = self.group()?;
                let f = self.unary()?;
                Ok(build(g, f))
            }
            _ => Err(self.error("expected a formula")),
        }
    }

    fn group(&mut self) -> Result<Group> {
        self.expect("{")?;
        let open = self.pos;
        let mut names = Vec::new();
        self.skip_ws();
        if self.rest().starts_with(b"}") {
            return Err(Error::Parse { pos: open, msg: "empty group".into() });
        }
        loop {
            self.skip_ws();
            let at = self.pos;
            let w = self.word().to_string();
            if w.is_empty() {
                return Err(self.error("expected an agent name"));
            }
            if w != "A" && !w.as_bytes()[0].is_ascii_lowercase() && !w.as_bytes()[0].is_ascii_digit() {
                return Err(Error::Parse { pos: at, msg: format!("bad agent name `{w}`") });
            }
            names.push((at, w));
            if self.eat(",") {
                continue;
            }
            self.expect("}")?;
            break;
        }
        if names.iter().any(|(_, w)| w == "A") {
            if names.len() > 1 {
                return Err(Error::Parse { pos: names[0].0, msg: "`A` must stand alone".into() });
            }
            return Ok(Group::All);
        }
        Group::agents(names.into_iter().map(|(_, w)| w))
    }
}
