//! HTTP and WebSocket front end for one navigation session.
//!
//! Routes:
//! - `POST /api/command` runs a command and answers with its report.
//! - `GET /api/state` returns the scene name, robot pose and last report.
//! - `GET /api/views` returns the current camera views in vector form.
//! - `GET /api/map` returns the occupancy grid run-length encoded.
//! - `GET /ws` streams pose events while a successful command is replayed.
//!
//! One command is in flight at a time; the session stays busy until the
//! playback of its trajectory has finished.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex, MutexGuard};
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use navcon_core::evalharness::Category;
use navcon_core::pipeline::{CommandReport, NavCommand, PipelineConfig, Session};
use navcon_core::projection::{assemble_representation, Mode, Representation};
use navcon_core::worldsim::{render_views_with, Pose, ViewSet, World};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tokio::sync::broadcast;

/// Simulated time between streamed poses.
pub const STREAM_PERIOD: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub pipeline: PipelineConfig,
    /// Wall-clock delay between streamed events.
    pub stream_interval: Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommandRequest {
    pub text: String,
    /// Must name the hosted scene when present.
    #[serde(default)]
    pub scene: Option<String>,
    #[serde(default)]
    pub representation: Option<Mode>,
    #[serde(default)]
    pub fixture: Option<String>,
    #[serde(default)]
    pub target: Option<String>,
    #[serde(default)]
    pub category: Option<Category>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum StreamEvent {
    /// Sent once to every new subscriber.
    State { scene: String, pose: Pose, busy: bool },
    /// `progress` is the fraction of the trajectory replayed, in [0, 1].
    Pose {
        seq: u64,
        pose: Pose,
        sim_time: f64,
        progress: f64,
        done: bool,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateResponse {
    pub scene: String,
    pub pose: Pose,
    pub busy: bool,
    pub commands_run: usize,
    pub last_report: Option<CommandReport>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ViewsResponse {
    pub views: ViewSet,
    pub panorama: Representation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapResponse {
    pub dims: [usize; 3],
    pub resolution: f64,
    /// Runs over the index `x + nx * (y + ny * z)`, alternating free and
    /// occupied, starting with a possibly empty free run.
    pub rle: Vec<u64>,
}

pub struct AppState {
    scene: String,
    session: Mutex<Session>,
    last_report: Mutex<Option<CommandReport>>,
    busy: AtomicBool,
    cfg: ServerConfig,
    events: broadcast::Sender<StreamEvent>,
}

/// Holds the session's single execution slot; releases it when dropped.
pub struct BusyGuard(Arc<AppState>);

impl Drop for BusyGuard {
    fn drop(&mut self) {
        self.0.busy.store(false, Ordering::Release);
    }
}

impl AppState {
    pub fn new(world: World, cfg: ServerConfig) -> Arc<Self> {
        let (events, _) = broadcast::channel(256);
        Arc::new(Self {
            scene: world.scene.name.clone(),
            session: Mutex::new(Session::new(world)),
            last_report: Mutex::new(None),
            busy: AtomicBool::new(false),
            cfg,
            events,
        })
    }

    pub fn try_begin(self: &Arc<Self>) -> Option<BusyGuard> {
        self.busy
            .compare_exchange(false, true, Ordering::AcqRel, Ordering::Acquire)
            .ok()
            .map(|_| BusyGuard(self.clone()))
    }

    pub fn is_busy(&self) -> bool {
        self.busy.load(Ordering::Acquire)
    }

    pub fn subscribe(&self) -> broadcast::Receiver<StreamEvent> {
        self.events.subscribe()
    }

    fn session(&self) -> MutexGuard<'_, Session> {
        self.session.lock().unwrap_or_else(|e| e.into_inner())
    }

    fn last_report(&self) -> MutexGuard<'_, Option<CommandReport>> {
        self.last_report.lock().unwrap_or_else(|e| e.into_inner())
    }

    fn state_event(&self) -> StreamEvent {
        StreamEvent::State {
            scene: self.scene.clone(),
            pose: self.session().robot.pose,
            busy: self.is_busy(),
        }
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/command", post(post_command))
        .route("/api/state", get(get_state))
        .route("/api/views", get(get_views))
        .route("/api/map", get(get_map))
        .route("/ws", get(ws_upgrade))
        .with_state(state)
}

pub async fn serve(listener: tokio::net::TcpListener, state: Arc<AppState>) -> anyhow::Result<()> {
    axum::serve(listener, router(state)).await?;
    Ok(())
}

fn error(status: StatusCode, message: impl Into<String>) -> Response {
    (status, Json(json!({ "error": message.into() }))).into_response()
}

async fn post_command(State(st): State<Arc<AppState>>, body: Bytes) -> Response {
    let req: CommandRequest = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return error(StatusCode::BAD_REQUEST, format!("malformed command: {e}")),
    };
    if req.text.trim().is_empty() {
        return error(StatusCode::BAD_REQUEST, "command text is empty");
    }
    if let Some(scene) = req.scene.as_deref().filter(|s| *s != st.scene) {
        return error(
            StatusCode::BAD_REQUEST,
            format!("this session hosts scene {}, not {scene}", st.scene),
        );
    }
    let Some(guard) = st.try_begin() else {
        return error(StatusCode::CONFLICT, "command in progress");
    };

    let mut cmd = NavCommand::new(req.text, st.scene.clone()).representation(req.representation.unwrap_or(Mode::A));
    cmd.category = req.category;
    cmd.target = req.target;
    if let Some(id) = req.fixture {
        cmd = cmd.fixture(id);
    }
    let worker = st.clone();
    let report = match tokio::task::spawn_blocking(move || worker.session().run(&cmd, &worker.cfg.pipeline)).await {
        Ok(r) => r,
        Err(e) => return error(StatusCode::INTERNAL_SERVER_ERROR, format!("command aborted: {e}")),
    };
    *st.last_report() = Some(report.clone());

    let trajectory = report
        .follow
        .as_ref()
        .filter(|f| f.success && !f.trajectory.is_empty())
        .map(|f| (f.trajectory.clone(), f.sim_time));
    if let Some((poses, sim_time)) = trajectory {
        tokio::spawn(playback(guard, poses, sim_time));
    }
    Json(report).into_response()
}

/// Replays a trajectory at [`STREAM_PERIOD`] of simulated time per event,
/// always ending on the final pose.
async fn playback(guard: BusyGuard, poses: Vec<Pose>, sim_time: f64) {
    let st = &guard.0;
    let dt = st.cfg.pipeline.follower.dt;
    let stride = ((STREAM_PERIOD / dt).round() as usize).max(1);
    let last = poses.len() - 1;
    let mut indices: Vec<usize> = (0..=last).step_by(stride).collect();
    if indices.last() != Some(&last) {
        indices.push(last);
    }
    let mut ticker = tokio::time::interval(st.cfg.stream_interval);
    for (seq, &i) in indices.iter().enumerate() {
        ticker.tick().await;
        let progress = if last == 0 { 1.0 } else { i as f64 / last as f64 };
        // No subscribers is not an error.
        let _ = st.events.send(StreamEvent::Pose {
            seq: seq as u64,
            pose: poses[i],
            sim_time: (i as f64 * dt).min(sim_time),
            progress,
            done: i == last,
        });
    }
    drop(guard);
}

async fn get_state(State(st): State<Arc<AppState>>) -> Json<StateResponse> {
    let (pose, commands_run) = {
        let s = st.session();
        (s.robot.pose, s.commands_run)
    };
    Json(StateResponse {
        scene: st.scene.clone(),
        pose,
        busy: st.is_busy(),
        commands_run,
        last_report: st.last_report().clone(),
    })
}

async fn get_views(State(st): State<Arc<AppState>>) -> Json<ViewsResponse> {
    let views = {
        let s = st.session();
        render_views_with(&s.world, &s.robot, false)
    };
    let panorama = assemble_representation(&views, Mode::A);
    Json(ViewsResponse { views, panorama })
}

async fn get_map(State(st): State<Arc<AppState>>) -> Json<MapResponse> {
    let s = st.session();
    Json(MapResponse {
        dims: s.world.map.dims(),
        resolution: s.world.map.resolution(),
        rle: s.world.map.rle(),
    })
}

async fn ws_upgrade(State(st): State<Arc<AppState>>, ws: WebSocketUpgrade) -> Response {
    ws.on_upgrade(move |socket| stream_events(socket, st))
}

async fn send_event(socket: &mut WebSocket, event: &StreamEvent) -> bool {
    match serde_json::to_string(event) {
        Ok(text) => socket.send(Message::Text(text.into())).await.is_ok(),
        Err(_) => false,
    }
}

async fn stream_events(mut socket: WebSocket, st: Arc<AppState>) {
    let mut rx = st.subscribe();
    if !send_event(&mut socket, &st.state_event()).await {
        return;
    }
    loop {
        tokio::select! {
            incoming = socket.recv() => match incoming {
                Some(Ok(Message::Close(_))) | None | Some(Err(_)) => return,
                Some(Ok(_)) => {}
            },
            event = rx.recv() => match event {
                Ok(e) => {
                    if !send_event(&mut socket, &e).await {
                        return;
                    }
                }
                Err(broadcast::error::RecvError::Lagged(_)) => {}
                Err(broadcast::error::RecvError::Closed) => return,
            },
        }
    }
}
