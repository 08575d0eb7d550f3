// Browser entry point: binds the controller to a root element. All clicks
// are handled by delegation on data-action attributes so the markup can be
// re-rendered wholesale after every state change.

import { createApiClient } from "./api.js";
import type { ApiClient } from "./api.js";
import { createController, DEFAULT_REFRESH_MS } from "./controller.js";
import type { Controller } from "./controller.js";
import { renderApp } from "./render.js";
import { TAB_NAMES } from "./types.js";
import type { TabName } from "./types.js";

export interface AppOptions {
  operator?: string;
  refreshIntervalMs?: number;
}

export interface App {
  controller: Controller;
  destroy(): void;
}

function isTabName(value: string): value is TabName {
  return (TAB_NAMES as readonly string[]).includes(value);
}

export function createApp(root: HTMLElement, api: ApiClient, options: AppOptions = {}): App {
  const operator = options.operator ?? "console";
  const controller = createController(api, {
    refreshIntervalMs: options.refreshIntervalMs ?? DEFAULT_REFRESH_MS,
  });

  function paint(): void {
    root.innerHTML = renderApp(controller.state, Date.now());
  }

  const unsubscribe = controller.subscribe(paint);

  function onClick(event: Event): void {
    const target = (event.target as HTMLElement | null)?.closest<HTMLElement>("[data-action]");
    if (!target) return;
    const action = target.dataset.action;
    if (action === "refresh") {
      void controller.refresh();
    } else if (action === "select-tab") {
      const tab = target.dataset.tab;
      if (tab !== undefined && isTabName(tab)) controller.selectTab(tab);
    } else if (action === "send-reply") {
      const postId = target.dataset.postId;
      if (postId !== undefined) {
        void controller.sendReply(controller.state.activeTab, postId, operator);
      }
    }
    // "open-original" is a plain anchor; the browser handles it.
  }

  function onSubmit(event: Event): void {
    const form = (event.target as HTMLElement | null)?.closest<HTMLFormElement>(
      "[data-role='keyword-editor']",
    );
    if (!form) return;
    event.preventDefault();
    const input = form.querySelector<HTMLInputElement>("input[name='query']");
    if (input) void controller.submitKeywords(input.value);
  }

  root.addEventListener("click", onClick);
  root.addEventListener("submit", onSubmit);

  paint();
  void controller.refresh();
  controller.start();

  return {
    controller,
    destroy() {
      controller.stop();
      unsubscribe();
      root.removeEventListener("click", onClick);
      root.removeEventListener("submit", onSubmit);
    },
  };
}

export function bootstrap(): void {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app element");
  const base = root.dataset.apiBase ?? "";
  createApp(root, createApiClient(base));
}
