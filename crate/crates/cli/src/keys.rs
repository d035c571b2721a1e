//! Loading translation keys and symbol inventories from disk.

use std::path::Path;

use proplang_core::{SymbolInventory, TranslationKey};

use crate::CliError;

pub fn load_key(path: &Path) -> Result<TranslationKey, CliError> {
    let text = crate::read_to_string(path)?;
    TranslationKey::parse(&text).map_err(|e| CliError::data(format!("key {}: {e}", path.display())))
}

/// Load an inventory file, or fall back to the built-in default set.
pub fn load_inventory(path: Option<&Path>) -> Result<SymbolInventory, CliError> {
    match path {
        Some(p) => {
            let text = crate::read_to_string(p)?;
            let inv = SymbolInventory::parse(&text);
            if inv.is_empty() {
                return Err(CliError::data(format!(
                    "inventory {} contains no symbols",
                    p.display()
                )));
            }
            Ok(inv)
        }
        None => Ok(SymbolInventory::default_lean()),
    }
}
