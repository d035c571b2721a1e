//! Concurrent evaluation driver: bounded parallelism with exponential
//! backoff on transport errors.
//!
//! Workers pull item indexes from a shared cursor and write responses into
//! per-index slots, so the scored result is identical whatever the
//! parallelism. A transport failure that survives all retries aborts the
//! run; the partial transcript comes back in the error so it can be
//! persisted as an invalid run.

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use proplang_core::{normalize_verdict, ClientError, ItemResult, ModelClient, RunResult, TestSet};

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub parallelism: usize,
    pub max_retries: u32,
    pub backoff: Duration,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            parallelism: 8,
            max_retries: 3,
            backoff: Duration::from_millis(250),
        }
    }
}

/// A run aborted by an unrecoverable client failure. `completed` holds the
/// items answered before the abort, for persisting as an invalid run.
#[derive(Debug, thiserror::Error)]
#[error("transport failure on item {id}: {message}")]
pub struct EvalRunError {
    pub id: String,
    pub message: String,
    pub completed: Vec<ItemResult>,
}

fn complete_with_retries(
    client: &dyn ModelClient,
    item: &proplang_core::EvalItem,
    opts: &RunOptions,
) -> Result<String, String> {
    let mut attempt = 0;
    loop {
        match client.complete(item) {
            Ok(response) => return Ok(response),
            Err(ClientError::Permanent(message)) => return Err(message),
            Err(ClientError::Transport(message)) => {
                if attempt >= opts.max_retries {
                    return Err(message);
                }
                std::thread::sleep(opts.backoff * 2u32.saturating_pow(attempt));
                attempt += 1;
            }
        }
    }
}

/// Query every item in the set exactly once (after retries) and score the
/// responses. Unknown verdicts count as incorrect.
pub fn run_eval(
    set: &TestSet,
    client: &dyn ModelClient,
    opts: &RunOptions,
) -> Result<RunResult, EvalRunError> {
    let cursor = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    let responses: Mutex<Vec<Option<String>>> = Mutex::new(vec![None; set.items.len()]);
    let failure: Mutex<Option<(String, String)>> = Mutex::new(None);

    let workers = opts.parallelism.max(1).min(set.items.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                if stop.load(Ordering::Relaxed) {
                    return;
                }
                let index = cursor.fetch_add(1, Ordering::Relaxed);
                if index >= set.items.len() {
                    return;
                }
                let item = &set.items[index];
                match complete_with_retries(client, item, opts) {
                    Ok(response) => {
                        responses.lock().unwrap()[index] = Some(response);
                    }
                    Err(message) => {
                        stop.store(true, Ordering::Relaxed);
                        let mut slot = failure.lock().unwrap();
                        if slot.is_none() {
                            *slot = Some((item.id.clone(), message));
                        }
                        return;
                    }
                }
            });
        }
    });

    let responses = responses.into_inner().unwrap();
    if let Some((id, message)) = failure.into_inner().unwrap() {
        let completed = set
            .items
            .iter()
            .zip(&responses)
            .filter_map(|(item, resp)| {
                resp.as_ref().map(|raw| ItemResult {
                    id: item.id.clone(),
                    expected: item.expected,
                    verdict: normalize_verdict(raw),
                    raw_response: raw.clone(),
                })
            })
            .collect();
        return Err(EvalRunError {
            id,
            message,
            completed,
        });
    }

    let responses: Vec<String> = responses
        .into_iter()
        .map(|r| r.expect("all items answered"))
        .collect();
    Ok(RunResult::from_responses(
        set.name.clone(),
        &set.items,
        &responses,
    ))
}
