/**
 * DOM rendering, framework-free.
 *
 * The avatar is schematic: a silhouette with an aura ring at its base and a
 * sphere above its head. Both are painted in one place from the single
 * server-sent color, so they cannot diverge.
 */

import type { DashboardViewState } from "./state.js";
import { overridesEnabled } from "./state.js";
import type { MpiColor, ProfileDoc, ScenarioDoc, RunReport } from "./types.js";

export const COLOR_CSS: Record<MpiColor, string> = {
  green: "rgb(46, 158, 79)",
  amber: "rgb(224, 168, 0)",
  red: "rgb(212, 61, 42)",
};
const NO_COLOR = "rgb(120, 120, 120)";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export interface DashboardCallbacks {
  onSliderInput(kind: string, value: number): void;
  onTransport(action: "start" | "pause" | "finish"): void;
}

export class Dashboard {
  readonly root: HTMLElement;
  private aura!: HTMLElement;
  private sphere!: HTMLElement;
  private colorLabel!: HTMLElement;
  private connectionLabel!: HTMLElement;
  private transportLabel!: HTMLElement;
  private tickLabel!: HTMLElement;
  private taskLabel!: HTMLElement;
  private logList!: HTMLElement;
  private noticeList!: HTMLElement;
  private reportView!: HTMLElement;
  private sliders = new Map<string, HTMLInputElement>();
  private readouts = new Map<string, HTMLElement>();
  private pendingBadges = new Map<string, HTMLElement>();
  private buttons!: Record<"start" | "pause" | "finish", HTMLButtonElement>;
  private renderedLogCount = 0;
  private renderedNoticeCount = 0;

  constructor(
    container: HTMLElement,
    profile: ProfileDoc,
    private readonly callbacks: DashboardCallbacks,
  ) {
    this.root = el("div", "dashboard");
    container.appendChild(this.root);

    const header = el("div", "header");
    this.connectionLabel = el("span", "connection", "idle");
    this.transportLabel = el("span", "transport", "-");
    this.tickLabel = el("span", "tick", "tick -");
    header.append(this.connectionLabel, this.transportLabel, this.tickLabel);
    this.root.appendChild(header);

    const main = el("div", "main");
    main.appendChild(this.buildAvatar());
    main.appendChild(this.buildSliders(profile));
    this.root.appendChild(main);

    const transport = el("div", "transport-bar");
    this.buttons = {
      start: el("button", "start", "start"),
      pause: el("button", "pause", "pause"),
      finish: el("button", "finish", "finish"),
    };
    for (const action of ["start", "pause", "finish"] as const) {
      this.buttons[action].addEventListener("click", () =>
        this.callbacks.onTransport(action));
      transport.appendChild(this.buttons[action]);
    }
    this.root.appendChild(transport);

    this.taskLabel = el("div", "task", "task: -");
    this.root.appendChild(this.taskLabel);

    const logPanel = el("div", "log-panel");
    logPanel.appendChild(el("h3", undefined, "reaction log"));
    this.logList = el("ul", "reaction-log");
    logPanel.appendChild(this.logList);
    this.root.appendChild(logPanel);

    this.noticeList = el("ul", "notices");
    this.root.appendChild(this.noticeList);

    this.reportView = el("pre", "report");
    this.reportView.style.display = "none";
    this.root.appendChild(this.reportView);

    this.colorLabel = el("div", "color-label", "-");
    this.root.appendChild(this.colorLabel);
  }

  private buildAvatar(): HTMLElement {
    const stage = el("div", "avatar-stage");
    this.sphere = el("div", "indicator sphere");
    const figure = el("div", "silhouette");
    this.aura = el("div", "indicator aura");
    stage.append(this.sphere, figure, this.aura);
    return stage;
  }

  private buildSliders(profile: ProfileDoc): HTMLElement {
    const panel = el("div", "sliders");
    for (const [kind, entry] of Object.entries(profile.kinds)) {
      const row = el("div", "slider-row");
      row.dataset.kind = kind;
      row.appendChild(el("label", "kind-name", kind));

      const track = el("div", "slider-track");
      const slider = document.createElement("input");
      slider.type = "range";
      slider.min = "0";
      slider.max = "1";
      slider.step = "0.01";
      slider.value = "0";
      slider.addEventListener("input", () => {
        this.callbacks.onSliderInput(kind, Number(slider.value));
      });
      track.appendChild(slider);
      // Threshold markers make the range boundaries visible to the operator.
      for (const cut of [entry.thresholds.t_low, entry.thresholds.t_high]) {
        const marker = el("span", "threshold-marker");
        marker.style.left = `${cut * 100}%`;
        marker.title = String(cut);
        track.appendChild(marker);
      }
      row.appendChild(track);

      const readout = el("span", "readout", "-");
      const pending = el("span", "pending-badge", "");
      pending.style.display = "none";
      row.append(readout, pending);
      panel.appendChild(row);

      this.sliders.set(kind, slider);
      this.readouts.set(kind, readout);
      this.pendingBadges.set(kind, pending);
    }
    return panel;
  }

  /** Both indicator channels are sampled from this element pair in tests. */
  indicatorElements(): { aura: HTMLElement; sphere: HTMLElement } {
    return { aura: this.aura, sphere: this.sphere };
  }

  sliderElement(kind: string): HTMLInputElement | undefined {
    return this.sliders.get(kind);
  }

  update(state: DashboardViewState): void {
    const css = state.mpiColor ? COLOR_CSS[state.mpiColor] : NO_COLOR;
    this.aura.style.backgroundColor = css;
    this.sphere.style.backgroundColor = css;
    this.colorLabel.textContent = state.mpiColor ?? "-";

    this.connectionLabel.textContent = state.connection;
    this.transportLabel.textContent = state.transport ?? "-";
    this.tickLabel.textContent = `tick ${state.lastTick ?? "-"}`;
    this.taskLabel.textContent = state.taskStep === null
      ? "task: -"
      : `task: ${state.taskStep} ${(state.taskFraction * 100).toFixed(0)}%`
        + (state.taskErrors ? ` errors=${state.taskErrors}` : "");

    const enabled = overridesEnabled(state);
    for (const [kind, slider] of this.sliders) {
      slider.disabled = !enabled;
      slider.title = enabled ? "" : "overrides need a running session";
      const view = state.kinds[kind];
      if (!view) continue;
      const readout = this.readouts.get(kind)!;
      readout.textContent = view.value === null
        ? "-"
        : `${view.value.toFixed(2)} ${view.level} ${view.status}`;
      readout.dataset.status = view.status ?? "";
      const badge = this.pendingBadges.get(kind)!;
      if (view.pending !== null) {
        badge.textContent = `pending ${view.pending.toFixed(2)}`;
        badge.style.display = "";
      } else {
        badge.style.display = "none";
      }
      if (view.value !== null && view.pending === null
          && document.activeElement !== slider) {
        slider.value = String(view.value);
      }
    }

    // The log is append-only, so only new entries need DOM work.
    for (let i = this.renderedLogCount; i < state.reactionLog.length; i += 1) {
      const entry = state.reactionLog[i]!;
      const item = el("li", "log-entry",
        `[${entry.tick}] ${entry.channel}: ${entry.animationId}`
        + (entry.sourceRuleId === "default" ? "" : ` (${entry.sourceRuleId})`));
      item.dataset.tick = String(entry.tick);
      item.dataset.animation = entry.animationId;
      this.logList.appendChild(item);
    }
    this.renderedLogCount = state.reactionLog.length;

    for (let i = this.renderedNoticeCount; i < state.notices.length; i += 1) {
      const notice = state.notices[i]!;
      this.noticeList.appendChild(el("li", `notice ${notice.kind}`, notice.text));
    }
    this.renderedNoticeCount = state.notices.length;

    this.buttons.start.disabled = !(state.transport === "created"
      || state.transport === "paused" || state.transport === null);
    this.buttons.pause.disabled = state.transport !== "running";
    this.buttons.finish.disabled = !(state.transport === "running"
      || state.transport === "paused");

    if (state.report) {
      this.reportView.style.display = "";
      this.reportView.textContent = formatReport(state.report);
    }
  }
}

export function formatReport(report: RunReport): string {
  const dwell = (Object.entries(report.dwell_ms) as Array<[MpiColor, number]>)
    .map(([color, ms]) => `${color}=${ms}ms`).join(" ");
  const reactions = Object.entries(report.reaction_events)
    .map(([animation, count]) => `${animation}x${count}`).join(" ") || "-";
  return [
    `ticks: ${report.ticks} (${report.duration_ms} ms)`,
    `task: ${report.task.completed ? "completed" : "incomplete"}`
      + (report.task.completion_ms !== null ? ` in ${report.task.completion_ms} ms` : "")
      + `, errors ${report.task.errors}`,
    `dwell: ${dwell}`,
    `reactions: ${reactions}`,
    `break suggestions: ${report.break_suggestions}`,
  ].join("\n");
}

/** Simple polyline preview of a scenario's keyframe timeline. */
export function renderTimelinePreview(scenario: ScenarioDoc): HTMLElement {
  const box = el("div", "timeline-preview");
  box.dataset.scenario = scenario.name;
  for (const [kind, keyframes] of Object.entries(scenario.timeline)) {
    const row = el("div", "timeline-row");
    row.appendChild(el("span", "timeline-kind", kind));
    const strip = el("div", "timeline-strip");
    for (const [t, value] of keyframes) {
      const dot = el("span", "timeline-dot");
      dot.style.left = `${(t / Math.max(1, scenario.duration_ms)) * 100}%`;
      dot.style.bottom = `${Math.max(0, Math.min(1, value)) * 100}%`;
      dot.title = `${t}ms: ${value}`;
      strip.appendChild(dot);
    }
    row.appendChild(strip);
    box.appendChild(row);
  }
  return box;
}
