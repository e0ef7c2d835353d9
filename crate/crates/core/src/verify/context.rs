use std::cell::OnceCell;

use crate::descendants::{Reducer, RewriteMode};
use crate::error::{Error, Result};
use crate::frame::{euler_field, f_vector, frame_rates, CanonicalFrame, FrameRates, PointTensors};
use crate::genus1::G0Context;
use crate::model::FrobeniusModel;
use crate::numeric::C64;

/// Everything an identity may need at one grid point, built lazily.
pub struct PointContext<'a> {
    pub model: &'a FrobeniusModel,
    pub frame: &'a CanonicalFrame,
    pub h: f64,
    tensors: OnceCell<PointTensors>,
    along_e: OnceCell<std::result::Result<Vec<FrameRates>, Error>>,
    along_x: OnceCell<std::result::Result<FrameRates, Error>>,
    g0: OnceCell<G0Context>,
    f: OnceCell<Vec<Vec<C64>>>,
}

impl<'a> PointContext<'a> {
    pub fn new(model: &'a FrobeniusModel, frame: &'a CanonicalFrame, h: f64) -> Self {
        Self {
            model,
            frame,
            h,
            tensors: OnceCell::new(),
            along_e: OnceCell::new(),
            along_x: OnceCell::new(),
            g0: OnceCell::new(),
            f: OnceCell::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.frame.dim()
    }

    pub fn tensors(&self) -> Result<&PointTensors> {
        if self.tensors.get().is_none() {
            let t = PointTensors::at(self.model, &self.frame.point)?;
            let _ = self.tensors.set(t);
        }
        Ok(self.tensors.get().expect("set above"))
    }

    pub fn g0(&self) -> Result<&G0Context> {
        if self.g0.get().is_none() {
            let t = G0Context::new(self.model, &self.frame.point)?;
            let _ = self.g0.set(t);
        }
        Ok(self.g0.get().expect("set above"))
    }

    /// `F_i` from four-point contractions.
    pub fn f_vectors(&self) -> Result<&Vec<Vec<C64>>> {
        if self.f.get().is_none() {
            let f = (0..self.n())
                .map(|i| f_vector(self.model, self.frame, i, f64::INFINITY).map(|r| r.direct))
                .collect::<Result<Vec<_>>>()?;
            let _ = self.f.set(f);
        }
        Ok(self.f.get().expect("set above"))
    }

    /// Frame rates along each idempotent.
    pub fn along_e(&self) -> Result<&[FrameRates]> {
        self.along_e
            .get_or_init(|| {
                (0..self.n())
                    .map(|k| frame_rates(self.model, self.frame, &self.frame.idempotent(k), self.h))
                    .collect()
            })
            .as_ref()
            .map(|v| v.as_slice())
            .map_err(Clone::clone)
    }

    /// Frame rates along the Euler field.
    pub fn along_x(&self) -> Result<&FrameRates> {
        self.along_x
            .get_or_init(|| {
                let x = euler_field(self.model, &self.frame.point);
                frame_rates(self.model, self.frame, &x, self.h)
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn reducer(&self, mode: RewriteMode) -> Result<Reducer<'_>> {
        Ok(Reducer::new(self.model, &self.frame.point, Some(self.frame))?.with_mode(mode))
    }
}
