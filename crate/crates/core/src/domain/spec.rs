use num_complex::Complex;

use super::{Domain, EuclideanSubdisk, Horodisk, RDenseComplement};
use crate::{Error, Result, Scalar};

/// Splits `name(a, b, …)` into the name and its numeric arguments.
pub(crate) fn parse_call(text: &str) -> std::result::Result<(String, Vec<f64>), String> {
    let text = text.trim();
    let open = text.find('(').ok_or("expected `name(args)`")?;
    if !text.ends_with(')') {
        return Err("missing closing parenthesis".into());
    }
    let name = text[..open].trim().to_ascii_lowercase();
    if name.is_empty() {
        return Err("missing name".into());
    }
    let body = &text[open + 1..text.len() - 1];
    let args = if body.trim().is_empty() {
        Vec::new()
    } else {
        body.split(',')
            .map(|a| {
                a.trim()
                    .parse::<f64>()
                    .map_err(|_| format!("`{}` is not a number", a.trim()))
            })
            .collect::<std::result::Result<Vec<_>, _>>()?
    };
    Ok((name, args))
}

pub(super) fn parse<T: Scalar>(spec: &str) -> Result<Domain<T>> {
    let fail = |reason: String| Error::DomainSpec {
        spec: spec.to_string(),
        reason,
    };
    let (name, args) = parse_call(spec).map_err(fail)?;
    let arity = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(fail(format!("`{name}` takes {n} arguments, got {}", args.len())))
        }
    };
    let lit = T::lit;
    let wrap = |e: Error| fail(e.to_string());
    match name.as_str() {
        "disk" => {
            arity(3)?;
            EuclideanSubdisk::new(Complex::new(lit(args[0]), lit(args[1])), lit(args[2]))
                .map(Domain::Disk)
                .map_err(wrap)
        }
        "horodisk" => {
            arity(2)?;
            Horodisk::new(lit(args[0]), lit(args[1]))
                .map(Domain::Horodisk)
                .map_err(wrap)
        }
        "rdense" => {
            arity(2)?;
            RDenseComplement::new(lit(args[0]), lit(args[1]))
                .map(Domain::RDense)
                .map_err(wrap)
        }
        other => Err(fail(format!(
            "unknown domain `{other}` (expected disk, horodisk or rdense)"
        ))),
    }
}
