//! Episode loop (stub).
