/** Browser bootstrap: pick profile and scenario, create a session, steer. */

import { ApiClient } from "./api.js";
import { DashboardApp } from "./app.js";
import { renderTimelinePreview } from "./render.js";

function apiBaseUrl(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("api");
  return fromQuery ?? "http://127.0.0.1:8787";
}

async function boot(): Promise<void> {
  const container = document.getElementById("app");
  if (!container) throw new Error("missing #app container");
  const baseUrl = apiBaseUrl();
  const api = new ApiClient(baseUrl);

  const picker = document.createElement("div");
  picker.className = "picker";
  const profileSelect = document.createElement("select");
  const scenarioSelect = document.createElement("select");
  const createButton = document.createElement("button");
  createButton.textContent = "create session";
  const preview = document.createElement("div");
  picker.append(profileSelect, scenarioSelect, createButton, preview);
  container.appendChild(picker);

  const [profiles, scenarios] = await Promise.all([
    api.listProfiles(), api.listScenarios(),
  ]);
  for (const profile of profiles.profiles) {
    const option = document.createElement("option");
    option.value = profile.worker_id;
    option.textContent = profile.display_name;
    profileSelect.appendChild(option);
  }
  for (const scenario of scenarios.scenarios) {
    const option = document.createElement("option");
    option.value = scenario.name;
    option.textContent = `${scenario.name} (${scenario.duration_ms} ms)`;
    scenarioSelect.appendChild(option);
  }

  const showPreview = async () => {
    preview.replaceChildren();
    if (scenarioSelect.value) {
      preview.appendChild(renderTimelinePreview(
        await api.getScenario(scenarioSelect.value)));
    }
  };
  scenarioSelect.addEventListener("change", () => void showPreview());
  await showPreview();

  createButton.addEventListener("click", () => {
    void (async () => {
      const profile = await api.getProfile(profileSelect.value);
      const app = new DashboardApp(container, baseUrl, profile);
      await app.createSession(profileSelect.value, scenarioSelect.value);
      picker.style.display = "none";
    })();
  });
}

void boot();
