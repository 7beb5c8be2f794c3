/**
 * WebSocket client with reconnect backoff. Frames go through protocol
 * validation before they reach the model; outbound messages are checked
 * before they leave.
 */

import { OutboundMessage, parseServerFrame, Snapshot, validateOutbound } from "./protocol.js";

export interface NetCallbacks {
  onSnapshot(snap: Snapshot): void;
  onStatus(status: "connecting" | "connected" | "disconnected"): void;
  onHello(dt: number, digest: string): void;
}

export class BridgeClient {
  private ws: WebSocket | null = null;
  private retries = 0;
  private closedByUser = false;

  constructor(private url: string, private cb: NetCallbacks) {}

  connect(): void {
    this.closedByUser = false;
    this.cb.onStatus("connecting");
    this.ws = new WebSocket(this.url);
    this.ws.onopen = () => {
      this.retries = 0;
      this.cb.onStatus("connected");
    };
    this.ws.onmessage = (ev: MessageEvent) => {
      const frame = parseServerFrame(String(ev.data));
      if (frame === null) return; // ignore error frames / junk
      if (frame.type === "hello") this.cb.onHello(frame.dt, frame.config_digest);
      else this.cb.onSnapshot(frame);
    };
    this.ws.onclose = () => {
      this.cb.onStatus("disconnected");
      if (!this.closedByUser) this.scheduleReconnect();
    };
    this.ws.onerror = () => {
      // onclose follows and handles the retry
    };
  }

  private scheduleReconnect(): void {
    const delay = Math.min(500 * 1.8 ** this.retries, 8000);
    this.retries += 1;
    setTimeout(() => {
      if (!this.closedByUser) this.connect();
    }, delay);
  }

  send(msg: OutboundMessage): boolean {
    const problem = validateOutbound(msg);
    if (problem !== null) {
      console.error("refusing to send invalid message:", problem);
      return false;
    }
    if (this.ws === null || this.ws.readyState !== WebSocket.OPEN) return false;
    this.ws.send(JSON.stringify(msg));
    return true;
  }

  close(): void {
    this.closedByUser = true;
    this.ws?.close();
  }
}
