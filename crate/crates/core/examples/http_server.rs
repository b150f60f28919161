//! Starts the dialog service on a free local port and drives one session
//! over plain HTTP/1.1.

use std::io::{Read, Write};
use std::net::{SocketAddr, TcpStream};

use denotate::dialog::DialogAgent;
use denotate::harness::{router, AppState, ServerConfig};
use serde_json::{json, Value};

fn request(addr: SocketAddr, method: &str, path: &str, body: Option<Value>) -> std::io::Result<(u16, Value)> {
    let body = body.map(|b| b.to_string()).unwrap_or_default();
    let mut s = TcpStream::connect(addr)?;
    write!(
        s,
        "{method} {path} HTTP/1.1\r\nHost: {addr}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
        body.len()
    )?;
    let mut raw = String::new();
    s.read_to_string(&mut raw)?;
    let status = raw.split(' ').nth(1).and_then(|c| c.parse().ok()).unwrap_or(0);
    let payload = raw.split_once("\r\n\r\n").map(|(_, b)| b).unwrap_or("");
    Ok((status, serde_json::from_str(payload).unwrap_or(Value::Null)))
}

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let app = AppState::new(DialogAgent::default(), ServerConfig::default())?;
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await?;
    let addr = listener.local_addr()?;
    tokio::spawn(async move { axum::serve(listener, router(app)).await });
    println!("serving on http://{addr}");

    let client = tokio::task::spawn_blocking(move || -> std::io::Result<()> {
        let (status, created) = request(addr, "POST", "/api/session", None)?;
        println!("POST /api/session -> {status} {created}");
        let id = created["session_id"].as_str().unwrap_or_default().to_string();
        for text in ["hello", "can you book a table in paris for two", "with french food", "in a moderate price range"]
        {
            let (status, reply) =
                request(addr, "POST", &format!("/api/session/{id}/turn"), Some(json!({ "text": text })))?;
            println!("{status} {text:?} -> {} [{}]", reply["response"], reply["fsm_state"]);
        }
        let (_, hist) = request(addr, "GET", &format!("/api/session/{id}/history"), None)?;
        println!("history has {} exchanges", hist["history"].as_array().map_or(0, Vec::len));
        let (status, _) = request(addr, "DELETE", &format!("/api/session/{id}"), None)?;
        println!("DELETE -> {status}");
        Ok(())
    });
    client.await??;
    Ok(())
}
