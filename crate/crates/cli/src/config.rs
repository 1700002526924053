use std::fs;
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{bail, Context};
use mixflag::coxeter::{CartanType, CoxeterSystem};
use mixflag::hecke::{HeckeAlgebra, PCanTable};
use mixflag::mixclass::MixedContext;

use crate::cache;
use crate::Format;

pub struct JobConfig {
    pub cartan_type: Option<CartanType>,
    pub characteristic: u64,
    pub pcan: Option<PathBuf>,
    pub pcan_dual: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub cache: Option<PathBuf>,
}

impl JobConfig {
    /// Builds the context: loads the KL cache, then the p-canonical tables.
    pub fn context(&self) -> anyhow::Result<MixedContext> {
        let ty = self.cartan_type.context("--type is required")?;
        let sys = Arc::new(CoxeterSystem::new(ty));
        let hecke = Arc::new(HeckeAlgebra::new(sys.clone()));
        let dual_hecke = Arc::new(HeckeAlgebra::new(Arc::new(sys.dual_system())));
        if let Some(dir) = &self.cache {
            cache::load(dir, &hecke);
            cache::load(dir, &dual_hecke);
        }
        let (pcan, pcan_dual) = match (&self.pcan, &self.pcan_dual) {
            (None, None) if self.characteristic == 0 => (
                PCanTable::characteristic_zero(&hecke),
                PCanTable::characteristic_zero(&dual_hecke),
            ),
            (Some(p), Some(q)) => (self.read_table(&hecke, p)?, self.read_table(&dual_hecke, q)?),
            _ => bail!(
                "characteristic {} requires both --pcan and --pcan-dual",
                self.characteristic
            ),
        };
        Ok(MixedContext::new(
            hecke,
            dual_hecke,
            Arc::new(pcan),
            Arc::new(pcan_dual),
        )?)
    }

    fn read_table(&self, hecke: &HeckeAlgebra, path: &PathBuf) -> anyhow::Result<PCanTable> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let table = PCanTable::from_json(hecke, &text).with_context(|| format!("validating {}", path.display()))?;
        if table.characteristic() != self.characteristic {
            bail!(
                "{} is a characteristic {} table, but --char is {}",
                path.display(),
                table.characteristic(),
                self.characteristic
            );
        }
        if table.len() != hecke.system().order() {
            bail!(
                "{} has {} entries, expected {}",
                path.display(),
                table.len(),
                hecke.system().order()
            );
        }
        Ok(table)
    }

    /// Persists the KL cache after a run.
    pub fn finish(&self, ctx: &MixedContext) -> anyhow::Result<()> {
        if let Some(dir) = &self.cache {
            let dual = ctx.dual();
            let mut entries = ctx.hecke().kl_snapshot();
            if dual.system().cartan_type() == ctx.system().cartan_type() {
                entries.extend(dual.hecke().kl_snapshot());
                entries.sort_by(|a, b| a.0.cmp(&b.0));
                entries.dedup_by(|a, b| a.0 == b.0);
            } else {
                cache::save(dir, dual.system().cartan_type(), &dual.hecke().kl_snapshot())?;
            }
            cache::save(dir, ctx.system().cartan_type(), &entries)?;
        }
        Ok(())
    }

    pub fn emit(&self, text: &str) -> anyhow::Result<()> {
        match &self.out {
            Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}
