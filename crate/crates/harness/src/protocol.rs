//! Line protocol for external agents.
//!
//! Every request is one JSON object on one line; every request gets exactly
//! one response line, in order. Commands:
//!
//! ```text
//! {"cmd":"reset","config":{...},"seed":7}    -> {"ok":true,"obs":{...},"action_dim":36,"space":{...}}
//! {"cmd":"step","raw_action":[...]}          -> {"ok":true,"obs":{...},"reward":..,"done":..,"action":{...},"info":{...}}
//! {"cmd":"step","action":{"channels":[..],"power_levels":[..],"ris_phases":[..]}}
//! {"cmd":"close"}                            -> {"ok":true}
//! ```
//!
//! `config` may be partial (missing fields take defaults) and `seed`
//! defaults to `config.seed`. Failures answer
//! `{"ok":false,"error":<code>[,"detail":<text>]}` and the session continues.
//!
//! Observations go over the wire as flat per-node feature arrays plus an
//! edge list of `[src, dst, kind]`; vehicles are nodes `0..V`, the BS is `V`
//! and the RIS `V+1`.

use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::net::{TcpListener, ToSocketAddrs};
use std::thread;

use risv2x_core::env::{Action, ActionSpace, EdgeKind, Env, Mobility, Observation, StepInfo};
use risv2x_core::scenario::ScenarioConfig;
use risv2x_core::Error as CoreError;
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireObservation {
    pub slot: usize,
    /// Per vehicle: `[x, y, gain_db×V, remaining_bits×V, interference_dbm×V, is_target, sensing_db]`.
    pub vehicle: Vec<Vec<f64>>,
    /// `[x, y, v2i_gain_db×V]`.
    pub bs: Vec<f64>,
    /// `[x, y, phase_index×F]`.
    pub ris: Vec<f64>,
    pub edges: Vec<(usize, usize, EdgeKind)>,
}

impl From<&Observation> for WireObservation {
    fn from(obs: &Observation) -> Self {
        WireObservation {
            slot: obs.slot,
            vehicle: obs.vehicles.iter().map(|v| v.features()).collect(),
            bs: obs.bs.features(),
            ris: obs.ris.features(),
            edges: obs.edges.iter().map(|e| (e.src, e.dst, e.kind)).collect(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "cmd", rename_all = "snake_case", deny_unknown_fields)]
enum Request {
    Reset {
        #[serde(default)]
        config: Option<Box<ScenarioConfig>>,
        #[serde(default)]
        seed: Option<u64>,
    },
    Step {
        #[serde(default)]
        raw_action: Option<Vec<f64>>,
        #[serde(default)]
        action: Option<Action>,
    },
    Close,
}

#[derive(Serialize)]
struct ResetResponse<'a> {
    ok: bool,
    obs: WireObservation,
    action_dim: usize,
    space: &'a ActionSpace,
}

#[derive(Serialize)]
struct StepResponse<'a> {
    ok: bool,
    obs: WireObservation,
    reward: f64,
    done: bool,
    action: &'a Action,
    info: &'a StepInfo,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorResponse {
    pub ok: bool,
    pub error: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

fn error_line(code: &str, detail: Option<String>) -> String {
    serde_json::to_string(&ErrorResponse {
        ok: false,
        error: code.to_string(),
        detail,
    })
    .expect("error record serialises")
}

fn core_error_line(err: CoreError) -> String {
    let code = match &err {
        CoreError::NotReset => return error_line("not_initialized", None),
        CoreError::EpisodeDone => "episode_done",
        CoreError::Config { .. } | CoreError::NoV2vPeer | CoreError::NotEnoughTrajectories { .. } => {
            "invalid_config"
        }
        CoreError::InvalidAction(_) | CoreError::LengthMismatch { .. } | CoreError::PhaseIndex { .. } => {
            "invalid_action"
        }
        _ => "simulation_error",
    };
    error_line(code, Some(err.to_string()))
}

/// One environment behind the protocol.
#[derive(Debug, Clone)]
pub struct Session {
    default_config: ScenarioConfig,
    mobility: Mobility,
    env: Option<Env>,
    closed: bool,
}

impl Session {
    pub fn new(default_config: ScenarioConfig, mobility: Mobility) -> Self {
        Session {
            default_config,
            mobility,
            env: None,
            closed: false,
        }
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Handles one request line and returns the response line (no newline).
    pub fn handle_line(&mut self, line: &str) -> String {
        let value: Value = match serde_json::from_str(line) {
            Ok(v) => v,
            Err(e) => return error_line("malformed_request", Some(e.to_string())),
        };
        match value.get("cmd").and_then(Value::as_str) {
            Some("reset" | "step" | "close") => {}
            Some(other) => return error_line("unknown_command", Some(other.to_string())),
            None => return error_line("malformed_request", Some("missing string field `cmd`".into())),
        }
        let request: Request = match serde_json::from_value(value) {
            Ok(r) => r,
            Err(e) => return error_line("bad_request", Some(e.to_string())),
        };
        match request {
            Request::Reset { config, seed } => self.reset(config, seed),
            Request::Step { raw_action, action } => self.step(raw_action, action),
            Request::Close => {
                self.closed = true;
                r#"{"ok":true}"#.to_string()
            }
        }
    }

    fn reset(&mut self, config: Option<Box<ScenarioConfig>>, seed: Option<u64>) -> String {
        let config = config.map_or_else(|| self.default_config.clone(), |c| *c);
        let seed = seed.unwrap_or(config.seed);
        let mut env = match Env::new(config, self.mobility.clone()) {
            Ok(env) => env,
            Err(e) => return core_error_line(e),
        };
        let obs = match env.reset(seed) {
            Ok(obs) => obs,
            Err(e) => return core_error_line(e),
        };
        let line = serde_json::to_string(&ResetResponse {
            ok: true,
            obs: WireObservation::from(&obs),
            action_dim: env.action_space().raw_dim(),
            space: env.action_space(),
        })
        .expect("reset response serialises");
        self.env = Some(env);
        line
    }

    fn step(&mut self, raw_action: Option<Vec<f64>>, action: Option<Action>) -> String {
        let Some(env) = self.env.as_mut() else {
            return error_line("not_initialized", None);
        };
        let action = match (raw_action, action) {
            (Some(raw), None) => match env.action_space().decode(&raw) {
                Ok(a) => a,
                Err(e) => return core_error_line(e),
            },
            (None, Some(a)) => a,
            _ => {
                return error_line(
                    "bad_request",
                    Some("exactly one of `raw_action` and `action` is required".into()),
                )
            }
        };
        match env.step(&action) {
            Ok(result) => serde_json::to_string(&StepResponse {
                ok: true,
                obs: WireObservation::from(&result.observation),
                reward: result.reward,
                done: result.done,
                action: &action,
                info: &result.info,
            })
            .expect("step response serialises"),
            Err(e) => core_error_line(e),
        }
    }
}

/// Serves one session over a line stream until `close` or end of input.
pub fn serve_stream<R: BufRead, W: Write>(reader: R, mut writer: W, mut session: Session) -> io::Result<()> {
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let response = session.handle_line(&line);
        writer.write_all(response.as_bytes())?;
        writer.write_all(b"\n")?;
        writer.flush()?;
        if session.is_closed() {
            break;
        }
    }
    Ok(())
}

pub fn serve_stdio(session: Session) -> io::Result<()> {
    let stdin = io::stdin();
    let stdout = io::stdout();
    serve_stream(stdin.lock(), BufWriter::new(stdout.lock()), session)
}

/// Accepts connections forever; each gets its own thread and environment.
pub fn serve_tcp<A: ToSocketAddrs>(addr: A, template: Session) -> io::Result<()> {
    let listener = TcpListener::bind(addr)?;
    serve_listener(listener, template)
}

pub fn serve_listener(listener: TcpListener, template: Session) -> io::Result<()> {
    for stream in listener.incoming() {
        let stream = stream?;
        let session = template.clone();
        thread::spawn(move || {
            let reader = match stream.try_clone() {
                Ok(s) => BufReader::new(s),
                Err(e) => {
                    eprintln!("connection setup failed: {e}");
                    return;
                }
            };
            if let Err(e) = serve_stream(reader, BufWriter::new(stream), session) {
                eprintln!("session ended with error: {e}");
            }
        });
    }
    Ok(())
}
