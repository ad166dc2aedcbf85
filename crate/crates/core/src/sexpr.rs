//! The derivation text format shared by every derivation kind.
//!
//! A node is `(tag arg* [conclusion] child*)`. The conclusion is kept as raw
//! text between square brackets (neither the type nor the term grammar uses
//! brackets) and is parsed by the owning module. The pretty form puts one
//! node per line, indented by depth; the compact form is a single line.

use crate::types::TypeError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub tag: String,
    pub args: Vec<String>,
    pub conclusion: String,
    pub children: Vec<Node>,
}

impl Node {
    pub fn new(tag: &str, args: Vec<String>, conclusion: String, children: Vec<Node>) -> Node {
        Node {
            tag: tag.to_string(),
            args,
            conclusion,
            children,
        }
    }

    fn head(&self) -> String {
        let mut s = format!("({}", self.tag);
        for a in &self.args {
            s.push(' ');
            s.push_str(a);
        }
        s.push_str(" [");
        s.push_str(&self.conclusion);
        s.push(']');
        s
    }

    pub fn to_compact(&self) -> String {
        let mut s = self.head();
        for c in &self.children {
            s.push(' ');
            s.push_str(&c.to_compact());
        }
        s.push(')');
        s
    }

    pub fn to_pretty(&self) -> String {
        let mut out = String::new();
        self.write_pretty(0, &mut out);
        out.push('\n');
        out
    }

    fn write_pretty(&self, depth: usize, out: &mut String) {
        out.push_str(&"  ".repeat(depth));
        out.push_str(&self.head());
        for c in &self.children {
            out.push('\n');
            c.write_pretty(depth + 1, out);
        }
        out.push(')');
    }

    pub fn render(&self, compact: bool) -> String {
        if compact {
            self.to_compact()
        } else {
            self.to_pretty()
        }
    }
}

pub fn parse(text: &str) -> Result<Node, TypeError> {
    let mut p = Reader { text, pos: 0 };
    p.skip_ws();
    let node = p.node()?;
    p.skip_ws();
    if p.pos != text.len() {
        return Err(p.error("trailing input after derivation"));
    }
    Ok(node)
}

struct Reader<'a> {
    text: &'a str,
    pos: usize,
}

impl Reader<'_> {
    fn error(&self, msg: &str) -> TypeError {
        TypeError::Syntax {
            position: self.pos,
            message: msg.to_string(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn expect(&mut self, c: char) -> Result<(), TypeError> {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.error(&format!("expected `{c}`")))
        }
    }

    fn word(&mut self) -> String {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_whitespace() || matches!(c, '(' | ')' | '[' | ']') {
                break;
            }
            self.pos += c.len_utf8();
        }
        self.text[start..self.pos].to_string()
    }

    fn node(&mut self) -> Result<Node, TypeError> {
        self.expect('(')?;
        self.skip_ws();
        let tag = self.word();
        if tag.is_empty() {
            return Err(self.error("expected a rule tag"));
        }
        let mut args = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some('[') => break,
                Some('(') | Some(')') | None => return Err(self.error("expected `[conclusion]`")),
                _ => args.push(self.word()),
            }
        }
        self.expect('[')?;
        let start = self.pos;
        let Some(len) = self.text[start..].find(']') else {
            return Err(self.error("unterminated conclusion"));
        };
        let conclusion = self.text[start..start + len].trim().to_string();
        self.pos = start + len + 1;
        let mut children = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some(')') => {
                    self.pos += 1;
                    break;
                }
                Some('(') => children.push(self.node()?),
                _ => return Err(self.error("expected child node or `)`")),
            }
        }
        Ok(Node {
            tag,
            args,
            conclusion,
            children,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pretty_and_compact_agree() {
        let leaf = Node::new("constr", vec![], "X |- X".into(), vec![]);
        let n = Node::new("wk", vec!["1".into()], "X, Y |- X".into(), vec![leaf]);
        let pretty = n.to_pretty();
        assert_eq!(pretty, "(wk 1 [X, Y |- X]\n  (constr [X |- X]))\n");
        assert_eq!(n.to_compact(), "(wk 1 [X, Y |- X] (constr [X |- X]))");
        assert_eq!(parse(&pretty).unwrap(), n);
        assert_eq!(parse(&n.to_compact()).unwrap(), n);
    }

    #[test]
    fn malformed_input() {
        assert!(parse("(wk 1 X |- X)").is_err());
        assert!(parse("(wk [X |- X]").is_err());
        assert!(parse("(wk [X |- X]) extra").is_err());
        assert!(parse("([X])").is_err());
    }
}
