// WebSocket transport with reconnect. On connection loss the dashboard shows
// a stale indicator; it never extrapolates data while disconnected.

export interface Transport {
  send(line: string): void;
  close(): void;
}

export interface TransportHooks {
  onLine(raw: string): void;
  onOpen(): void;
  onStale(): void;
}

export function connect(url: string, hooks: TransportHooks,
                        reconnectMs = 1500): Transport {
  let socket: WebSocket | null = null;
  let closed = false;

  const open = () => {
    socket = new WebSocket(url);
    socket.addEventListener("open", () => hooks.onOpen());
    socket.addEventListener("message", (ev) => {
      if (typeof ev.data === "string") hooks.onLine(ev.data);
    });
    socket.addEventListener("close", () => {
      hooks.onStale();
      if (!closed) setTimeout(open, reconnectMs);
    });
    socket.addEventListener("error", () => {
      socket?.close();
    });
  };
  open();

  return {
    send(line: string) {
      if (socket && socket.readyState === WebSocket.OPEN) socket.send(line);
    },
    close() {
      closed = true;
      socket?.close();
    },
  };
}
