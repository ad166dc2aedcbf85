//! Reading inputs and rendering parse errors with their position.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use intersub::axiomatic::AxError;
use intersub::lambda::LambdaError;
use intersub::syntax::parse_signature;
use intersub::{IscError, Signature, TypeError, Undeclared};

/// The signature named by `--sig`, or the arrow/product instance that
/// declares base types on first use.
pub fn signature(path: Option<&Path>) -> Result<(Signature, Undeclared)> {
    match path {
        Some(p) => {
            let text = read(p)?;
            let sig = parse_signature(&text).map_err(|e| located(&e, &text, &p.display().to_string()))?;
            Ok((sig, Undeclared::Reject))
        }
        None => Ok((Signature::arrow_product([]), Undeclared::DeclareAtoms)),
    }
}

/// Contents of `path`, or of standard input for `-`.
pub fn read(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .context("reading standard input")?;
        return Ok(s);
    }
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn named(path: &PathBuf) -> String {
    if path == Path::new("-") {
        "<stdin>".into()
    } else {
        path.display().to_string()
    }
}

pub fn syntax_of<'a>(e: &'a (dyn std::error::Error + 'static)) -> Option<&'a TypeError> {
    let mut cur: Option<&(dyn std::error::Error + 'static)> = Some(e);
    while let Some(err) = cur {
        if let Some(t @ TypeError::Syntax { .. }) = err.downcast_ref::<TypeError>() {
            return Some(t);
        }
        if let Some(IscError::Type(t)) = err.downcast_ref::<IscError>() {
            return Some(t);
        }
        if let Some(AxError::Type(t) | AxError::Isc(IscError::Type(t))) = err.downcast_ref::<AxError>() {
            return Some(t);
        }
        if let Some(LambdaError::Type(t) | LambdaError::Isc(IscError::Type(t))) = err.downcast_ref::<LambdaError>() {
            return Some(t);
        }
        cur = err.source();
    }
    None
}

/// An error message pointing at the offending byte of `text`.
pub fn located(e: &(dyn std::error::Error + 'static), text: &str, origin: &str) -> anyhow::Error {
    let Some(TypeError::Syntax { position, message }) = syntax_of(e) else {
        return anyhow!("{origin}: {e}");
    };
    let pos = (*position).min(text.len());
    let line_start = text[..pos].rfind('\n').map_or(0, |i| i + 1);
    let line_end = text[pos..].find('\n').map_or(text.len(), |i| pos + i);
    let line_no = text[..pos].matches('\n').count() + 1;
    let col = text[line_start..pos].chars().count() + 1;
    let line = &text[line_start..line_end];
    anyhow!(
        "{origin}:{line_no}:{col}: {message}\n  {line}\n  {}^",
        " ".repeat(col - 1)
    )
}
