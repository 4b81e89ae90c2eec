//! Parallel grid estimation. Pixels are independent and results are collected
//! in pixel order, so the output does not depend on the worker count.

use rayon::prelude::*;
use rayon::ThreadPool;
use rscc_core::grid::{check_julia_inputs, check_path_inputs, julia_pixel, path_pixel, GridParams, GridWindow, MembershipGrid};
use rscc_core::{MapSpec, Result, ScenarioSpec, StatePoint};

use crate::error::{usage, CliResult};

pub const THREADS_ENV: &str = "RSCC_THREADS";

/// Worker count from `RSCC_THREADS`; unset means all cores.
pub fn threads_from_env() -> CliResult<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(usage(format!("{THREADS_ENV} must be a positive integer, got '{v}'"))),
        },
    }
}

pub fn pool(threads: Option<usize>) -> CliResult<ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        b = b.num_threads(n);
    }
    b.build().map_err(|e| usage(format!("cannot start worker pool: {e}")))
}

pub fn julia_grid(
    pool: &ThreadPool,
    spec: &ScenarioSpec,
    w: &StatePoint,
    window: &GridWindow,
    params: &GridParams,
) -> Result<MembershipGrid> {
    check_julia_inputs(spec, w, params)?;
    let pixels = pool.install(|| {
        (0..window.pixel_count())
            .into_par_iter()
            .map(|p| julia_pixel(spec, w, window, params, p))
            .collect::<Result<Vec<_>>>()
    })?;
    MembershipGrid::from_pixels(*window, pixels)
}

pub fn path_grid(
    pool: &ThreadPool,
    maps: &[MapSpec],
    window: &GridWindow,
    probe_offset: f64,
    diam_threshold: f64,
) -> Result<MembershipGrid> {
    check_path_inputs(maps, probe_offset, diam_threshold)?;
    let pixels = pool.install(|| {
        (0..window.pixel_count())
            .into_par_iter()
            .map(|p| path_pixel(maps, window, probe_offset, diam_threshold, p))
            .collect::<Result<Vec<_>>>()
    })?;
    MembershipGrid::from_pixels(*window, pixels)
}
