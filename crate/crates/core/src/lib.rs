pub mod api;
pub mod clustering;
pub mod comic;
pub mod community;
pub mod graph;
pub mod io;
pub mod layout;
pub mod similarity;
pub mod narrative;
pub mod render;
pub mod server;
pub mod cli;
