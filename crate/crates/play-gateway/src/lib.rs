//! Live human-vs-bot sessions over HTTP. The human always plays center; bot
//! edges reply server-side as soon as it is their turn.

pub mod http;
pub mod manager;
pub mod wire;

pub use http::router;
pub use manager::{Clock, GatewayError, ManualClock, SessionManager, SystemClock, DEFAULT_TTL};
