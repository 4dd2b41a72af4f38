// Small transient notifications, errors stay a bit longer.

export function showToast(message: string, kind: "info" | "error" = "info"): void {
  const container = document.getElementById("toasts");
  if (!container) return;
  const node = document.createElement("div");
  node.className = `toast toast-${kind}`;
  node.textContent = message;
  container.appendChild(node);
  setTimeout(() => node.remove(), kind === "error" ? 6000 : 3000);
}
