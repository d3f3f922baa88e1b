use crate::args::CodeArgs;
use crate::{CliError, CliResult};
use crcconv::convcode::{CodeConfig, CodeSpec, Termination};
use crcconv::gf2poly::{self, CrcScheme, GenOrder};
use serde::Serialize;
use std::path::Path;

/// Reads `--config` (if any) and applies the inline overrides.
///
/// With no file, k, nu, gens and mode must be given inline. m defaults to
/// the degree of `--crc`, and the CRC to the trivial one.
pub fn load_code(path: Option<&Path>, args: &CodeArgs) -> CliResult<CodeConfig> {
    let base: Option<CodeConfig> = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| {
                CliError::config(format!("cannot read config {}: {e}", p.display()))
            })?;
            Some(
                serde_json::from_str(&text)
                    .map_err(|e| CliError::config(format!("bad config {}: {e}", p.display())))?,
            )
        }
        None => None,
    };
    let need = |what: &str| CliError::config(format!("{what} missing: pass --config or --{what}"));
    let mode = match &args.mode {
        Some(s) => s.parse::<Termination>()?,
        None => base.as_ref().map(|b| b.mode).ok_or_else(|| need("mode"))?,
    };
    let gen_order = match args.gen_order.as_deref() {
        Some("low-first") => GenOrder::LowFirst,
        Some("high-first") => GenOrder::HighFirst,
        Some(o) => {
            return Err(CliError::config(format!(
                "gen-order {o:?}: want low-first or high-first"
            )))
        }
        None => base.as_ref().map(|b| b.gen_order).unwrap_or_default(),
    };
    let gens = match &args.gens {
        Some(g) => g.clone(),
        None => base
            .as_ref()
            .map(|b| b.gens_octal.clone())
            .ok_or_else(|| need("gens"))?,
    };
    let crc_hex = args
        .crc
        .clone()
        .or_else(|| base.as_ref().map(|b| b.crc_hex.clone()))
        .unwrap_or_else(|| "0x1".into());
    let m = match (args.m, &args.crc) {
        (Some(m), _) => m,
        (None, Some(c)) => gf2poly::parse_hex_crc(c)?.degree(),
        (None, None) => base.as_ref().map(|b| b.m).unwrap_or(0),
    };
    Ok(CodeConfig {
        k: args
            .k
            .or(base.as_ref().map(|b| b.k))
            .ok_or_else(|| need("k"))?,
        m,
        nu: args
            .nu
            .or(base.as_ref().map(|b| b.nu))
            .ok_or_else(|| need("nu"))?,
        omega: gens.len(),
        gens_octal: gens,
        crc_hex,
        mode,
        gen_order,
    })
}

/// The convolutional code alone; the CRC field is not consulted.
pub fn code_without_crc(cfg: &CodeConfig) -> CliResult<CodeSpec> {
    let gens = cfg
        .gens_octal
        .iter()
        .map(|s| gf2poly::parse_octal_gen_with(s, cfg.gen_order))
        .collect::<crcconv::Result<Vec<_>>>()?;
    Ok(CodeSpec::new(cfg.k, cfg.m, cfg.nu, gens, cfg.mode)?)
}

pub fn resolve(cfg: &CodeConfig) -> CliResult<(CodeSpec, CrcScheme)> {
    Ok(cfg.resolve()?)
}

/// Resolved run parameters embedded in every output file.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord<'a, P: Serialize> {
    pub command: &'static str,
    pub version: &'static str,
    pub git_rev: &'static str,
    pub seed: u64,
    pub code: &'a CodeConfig,
    pub params: &'a P,
}

pub const GIT_REV: &str = match option_env!("CRCCONV_GIT_REV") {
    Some(r) => r,
    None => "unknown",
};

pub const DEFAULT_SEED: u64 = 1;
