//! `convert`: path files between the binary container and JSON.

use std::path::{Path, PathBuf};

use hoferlike::io::{decode_path, encode_path, path_from_json, path_to_json, PathFile, PATH_MAGIC};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Binary,
}

pub fn read_any(bytes: &[u8]) -> Result<PathFile, CliError> {
    if bytes.starts_with(PATH_MAGIC) {
        return Ok(decode_path(bytes)?);
    }
    let text = std::str::from_utf8(bytes).map_err(|e| {
        CliError::Core(hoferlike::Error::Parse {
            offset: e.valid_up_to(),
            message: "neither a binary path file nor UTF-8 JSON".into(),
        })
    })?;
    Ok(path_from_json(text)?)
}

pub fn render(file: &PathFile, to: Format) -> Vec<u8> {
    match to {
        Format::Binary => encode_path(file),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&path_to_json(file)).expect("path serializes");
            s.push('\n');
            s.into_bytes()
        }
    }
}

pub fn default_output(input: &Path, to: Format) -> PathBuf {
    input.with_extension(match to {
        Format::Json => "json",
        Format::Binary => "hlp",
    })
}

pub fn convert(input: &Path, to: Format, output: Option<&Path>) -> Result<PathBuf, CliError> {
    let bytes =
        std::fs::read(input).map_err(|e| CliError::Io(format!("{}: {e}", input.display())))?;
    let file = read_any(&bytes)?;
    let out = output
        .map(Path::to_path_buf)
        .unwrap_or_else(|| default_output(input, to));
    if out == input {
        return Err(CliError::Usage(
            "output would overwrite the input; pass --output".into(),
        ));
    }
    std::fs::write(&out, render(&file, to))
        .map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    Ok(out)
}
