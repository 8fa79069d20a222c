//! Flat TOML option files.
//!
//! Each `key = value` pair becomes a `--key=value` token placed directly
//! after the subcommand name. Clap keeps the last occurrence of a flag, so
//! anything typed on the command line still wins over the file.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::CommandFactory;
use toml::Value;

use crate::cli::Cli;
use crate::error::CliError;

/// Path given by `--config`, if any.
fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--" {
            break;
        }
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

/// 1-based line on which `key` is assigned.
fn line_of(text: &str, key: &str) -> Option<usize> {
    text.lines().position(|l| {
        let l = l.trim_start();
        let l = l.strip_prefix('"').unwrap_or(l);
        l.strip_prefix(key)
            .is_some_and(|rest| rest.trim_start_matches('"').trim_start().starts_with('='))
    })
    .map(|i| i + 1)
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Integer(n) => Some(n.to_string()),
        Value::Float(x) => Some(x.to_string()),
        Value::Boolean(b) => Some(b.to_string()),
        _ => None,
    }
}

/// Returns `args` with the options of the `--config` file spliced in.
pub fn expand_args(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    let err = |message: String| CliError::Config {
        path: path.clone(),
        message,
    };
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| err(e.to_string()))?;

    let root = Cli::command();
    let Some((pos, sub)) = args.iter().enumerate().skip(1).find_map(|(i, a)| {
        let a = a.to_str()?;
        root.find_subcommand(a).map(|s| (i, s.clone()))
    }) else {
        // no subcommand: let clap report it
        return Ok(args);
    };

    let mut tokens = Vec::new();
    for (key, value) in &table {
        let at = |msg: String| match line_of(&text, key) {
            Some(l) => err(format!("line {l}, key `{key}`: {msg}")),
            None => err(format!("key `{key}`: {msg}")),
        };
        let flag = key.replace('_', "-");
        if flag == "config" {
            return Err(at("config files cannot include other config files".into()));
        }
        let arg = sub
            .get_arguments()
            .chain(root.get_arguments())
            .find(|a| a.get_long() == Some(flag.as_str()))
            .ok_or_else(|| at(format!("not an option of `{}`", sub.get_name())))?;
        let takes_value = arg.get_action().takes_values();
        let text_value = match value {
            Value::Array(items) => items
                .iter()
                .map(|v| scalar(v).ok_or_else(|| at("arrays may only hold scalars".into())))
                .collect::<Result<Vec<_>, _>>()?
                .join(","),
            Value::Boolean(b) if !takes_value => {
                if *b {
                    tokens.push(OsString::from(format!("--{flag}")));
                }
                continue;
            }
            v => scalar(v).ok_or_else(|| at("expected a string, number, boolean or array".into()))?,
        };
        if !takes_value {
            return Err(at(format!("`{flag}` is a switch and takes true or false")));
        }
        tokens.push(OsString::from(format!("--{flag}={text_value}")));
    }

    let mut out = args;
    out.splice(pos + 1..pos + 1, tokens);
    Ok(out)
}

/// Convenience for tests: expands and parses.
pub fn parse_with_config<I, T>(args: I) -> Result<Cli, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    use clap::Parser;
    let args = expand_args(args.into_iter().map(Into::into).collect())?;
    Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string()))
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::Command;
    use std::io::Write;

    fn file(body: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(body.as_bytes()).unwrap();
        f
    }

    #[test]
    fn command_line_beats_file_beats_default() {
        let f = file("samples = 7\nr0 = 0.004\nstrict = true\n");
        let p = f.path().to_str().unwrap();
        let cli = parse_with_config(["qgeo", "fig4", "--config", p, "--samples", "9"]).unwrap();
        let Command::Fig4(c) = cli.command else { panic!() };
        assert_eq!(c.samples, 9);
        assert_eq!(c.search.r0, 0.004);
        assert_eq!(c.search.grid, 12);
        assert!(cli.global.strict);
    }

    #[test]
    fn arrays_and_underscores() {
        let f = file("theta = [0.3, 0.7, 0.2, 0.5]\nhalf_width = 1.5\n");
        let p = f.path().to_str().unwrap();
        let cli = parse_with_config(["qgeo", "--config", p, "qgt"]).unwrap();
        let Command::Qgt(c) = cli.command else { panic!() };
        assert_eq!(c.point.theta, vec![0.3, 0.7, 0.2, 0.5]);
        assert_eq!(c.model.half_width, 1.5);
    }

    #[test]
    fn unknown_key_reports_line() {
        let f = file("samples = 7\n\nbogus = 1\n");
        let p = f.path().to_str().unwrap();
        let e = parse_with_config(["qgeo", "fig4", "--config", p]).unwrap_err();
        assert!(e.to_string().contains("line 3, key `bogus`"), "{e}");
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn syntax_error_reports_position() {
        let f = file("samples = \n");
        let p = f.path().to_str().unwrap();
        let e = parse_with_config(["qgeo", "fig4", "--config", p]).unwrap_err();
        assert!(e.to_string().contains("line 1"), "{e}");
    }
}
