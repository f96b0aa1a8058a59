//! Command-line front end and HTTP/WebSocket service for the navigation
//! pipeline.

pub mod commands;
pub mod server;
