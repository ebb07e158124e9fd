// Websocket client: sends sequenced messages, feeds server messages into
// the state reducer, exposes simple hooks for the UI layer.

import { MessageSequencer, parseServerMessage, TeleopDelta, WireMessage } from "./protocol.js";
import { applyServerMessage, initialState, UiSessionState } from "./state.js";

export class GatewayClient {
  state: UiSessionState = initialState();
  private ws: WebSocket;
  private seq = new MessageSequencer();
  onChange: (state: UiSessionState) => void = () => {};

  constructor(url: string) {
    this.ws = new WebSocket(url);
    this.ws.onopen = () => {
      this.state = { ...this.state, connection: "open" };
      this.sendRaw(this.seq.hello());
      this.onChange(this.state);
    };
    this.ws.onclose = () => {
      this.state = { ...this.state, connection: "closed" };
      this.onChange(this.state);
    };
    this.ws.onerror = () => {
      this.state = { ...this.state, connection: "error" };
      this.onChange(this.state);
    };
    this.ws.onmessage = (event) => {
      const msg = parseServerMessage(String(event.data));
      if (!msg) return;
      this.state = applyServerMessage(this.state, msg);
      this.onChange(this.state);
    };
  }

  private sendRaw(msg: WireMessage) {
    if (this.ws.readyState === WebSocket.OPEN) {
      this.ws.send(JSON.stringify(msg));
    }
  }

  setIntervention(on: boolean) {
    this.sendRaw(this.seq.make(on ? "intervene_on" : "intervene_off"));
  }

  // returns false when suppressed because intervention is off
  teleop(delta: TeleopDelta): boolean {
    if (!this.state.intervened) return false;
    this.sendRaw(this.seq.teleop(delta));
    return true;
  }

  reset() {
    this.sendRaw(this.seq.make("reset"));
  }

  save() {
    this.sendRaw(this.seq.make("save"));
  }
}
