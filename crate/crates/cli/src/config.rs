//! Flat `key = value` config files.
//!
//! Each key names a long flag of the chosen subcommand. Entries are spliced
//! into the argument list ahead of the real flags, and since every flag
//! overrides earlier occurrences of itself, the command line wins.

use std::ffi::OsString;
use std::path::Path;

use clap::Command;
use fskq::Error;

fn bad(reason: String) -> Error {
    Error::InvalidParameter { name: "config", reason }
}

/// Parses `text` into `(key, value)` pairs. Blank lines and `#` comments are
/// skipped; `_` in keys is read as `-`.
pub fn parse(text: &str) -> Result<Vec<(String, String)>, Error> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| bad(format!("line {}: expected key = value", lineno + 1)))?;
        let key = key.trim().replace('_', "-");
        if key.is_empty() {
            return Err(bad(format!("line {}: empty key", lineno + 1)));
        }
        out.push((key, value.trim().to_string()));
    }
    Ok(out)
}

/// Turns config entries into flags for `sub`.
pub fn to_flags(entries: &[(String, String)], sub: &Command) -> Result<Vec<OsString>, Error> {
    let mut flags = Vec::new();
    for (key, value) in entries {
        let arg = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(key.as_str()))
            .ok_or_else(|| bad(format!("unknown key '{key}' for '{}'", sub.get_name())))?;
        if arg.get_action().takes_values() {
            flags.push(format!("--{key}").into());
            flags.push(value.into());
        } else {
            match value.as_str() {
                "true" | "yes" | "1" => flags.push(format!("--{key}").into()),
                "false" | "no" | "0" => {}
                other => return Err(bad(format!("'{key}' expects true or false, got '{other}'"))),
            }
        }
    }
    Ok(flags)
}

/// Rewrites `argv` so that entries of any `--config FILE` come right after
/// the subcommand name.
pub fn expand_args(argv: Vec<OsString>, cmd: &Command) -> Result<Vec<OsString>, Error> {
    let position = argv.iter().position(|a| a == "--config");
    let inline = argv
        .iter()
        .position(|a| a.to_str().is_some_and(|s| s.starts_with("--config=")));
    let (path, rest): (String, Vec<OsString>) = match (position, inline) {
        (Some(i), _) => {
            let path = argv
                .get(i + 1)
                .ok_or_else(|| bad("--config needs a file".into()))?
                .to_string_lossy()
                .into_owned();
            let rest = argv
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i && *j != i + 1)
                .map(|(_, a)| a.clone())
                .collect();
            (path, rest)
        }
        (None, Some(i)) => {
            let path = argv[i].to_string_lossy()["--config=".len()..].to_string();
            let rest = argv
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, a)| a.clone())
                .collect();
            (path, rest)
        }
        (None, None) => return Ok(argv),
    };
    let text = std::fs::read_to_string(Path::new(&path)).map_err(|e| Error::Io {
        path: path.clone(),
        reason: e.to_string(),
    })?;
    let entries = parse(&text)?;
    let sub_index = rest
        .iter()
        .enumerate()
        .skip(1)
        .find(|(_, a)| cmd.find_subcommand(a).is_some())
        .map(|(i, _)| i)
        .ok_or_else(|| bad("--config needs a subcommand".into()))?;
    let sub = cmd.find_subcommand(&rest[sub_index]).expect("found above");
    let flags = to_flags(&entries, sub)?;
    let mut out = rest[..=sub_index].to_vec();
    out.extend(flags);
    out.extend_from_slice(&rest[sub_index + 1..]);
    Ok(out)
}
