//! Interactive sessions over HTTP.
//!
//! [`Session`] is the synchronous phase machine; [`router`] exposes a registry
//! of sessions as a JSON API:
//!
//! | method | path | body | response |
//! |---|---|---|---|
//! | `POST` | `/sessions` | [`CreateRequest`] | `201` [`CreateResponse`] |
//! | `GET` | `/sessions/{id}/trial?token=` | | [`TrialView`] |
//! | `POST` | `/sessions/{id}/choice` | [`ChoiceRequest`] | [`SubmitOutcome`] (a [`RevealView`] once all choices are in) |
//! | `POST` | `/sessions/{id}/advance?token=` | | [`TrialView`] |
//! | `GET` | `/sessions/{id}/stats` | | [`StatsView`] |
//! | `DELETE` | `/sessions/{id}` | | [`FinalReport`] |
//! | `GET` | `/health` | | `{"status":"ok"}` |
//!
//! Errors are `{"error": {"code", "message"}}` with codes `unknown_session`
//! (404), `wrong_phase` (409, or 410 once closed), `bad_choice` (400) and
//! `mode_mismatch` (400).

mod error;
mod http;
mod session;

pub use error::SessionError;
pub use http::{router, serve, AppState, ChoiceRequest, CreateRequest, CreateResponse, Tokens};
pub use session::{
    Choice, FinalReport, HumanRole, Phase, RevealView, Role, Session, SessionConfig, StatsView, SubmitOutcome,
    TrialView,
};
