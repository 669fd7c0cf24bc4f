import type { FileProvider } from "./types";
import { Viewer } from "./viewer";

function keyFor(relativePath: string): string {
  const parts = relativePath.split("/").filter((p) => p.length > 0);
  return parts.length > 1 ? parts.slice(1).join("/") : parts.join("/");
}

function providerFromFiles(files: { path: string; file: File }[]): FileProvider {
  const map = new Map<string, File>();
  for (const { path, file } of files) map.set(keyFor(path), file);
  return {
    read(path: string): Promise<string> {
      const file = map.get(path);
      if (!file) return Promise.reject(new Error(`missing file ${path}`));
      return file.text();
    },
  };
}

function collectEntry(
  entry: FileSystemEntry,
  prefix: string,
  out: { path: string; file: File }[],
): Promise<void> {
  if (entry.isFile) {
    return new Promise((resolve, reject) => {
      (entry as FileSystemFileEntry).file((file) => {
        out.push({ path: `${prefix}${entry.name}`, file });
        resolve();
      }, reject);
    });
  }
  const reader = (entry as FileSystemDirectoryEntry).createReader();
  const readAll = (): Promise<void> =>
    new Promise((resolve, reject) => {
      reader.readEntries(async (entries) => {
        if (entries.length === 0) {
          resolve();
          return;
        }
        for (const child of entries) {
          await collectEntry(child, `${prefix}${entry.name}/`, out);
        }
        resolve(readAll());
      }, reject);
    });
  return readAll();
}

function setup(): void {
  const app = document.getElementById("app");
  if (!app) return;
  const viewer = new Viewer(app);

  const picker = document.getElementById("dir-picker") as HTMLInputElement | null;
  picker?.addEventListener("change", () => {
    const files = Array.from(picker.files ?? []).map((file) => ({
      path: (file as File & { webkitRelativePath?: string }).webkitRelativePath || file.name,
      file,
    }));
    void viewer.load(providerFromFiles(files));
  });

  document.body.addEventListener("dragover", (ev) => ev.preventDefault());
  document.body.addEventListener("drop", (ev) => {
    ev.preventDefault();
    const items = Array.from(ev.dataTransfer?.items ?? []);
    const out: { path: string; file: File }[] = [];
    void (async () => {
      for (const item of items) {
        const entry = item.webkitGetAsEntry?.();
        if (entry) await collectEntry(entry, "", out);
      }
      if (out.length > 0) await viewer.load(providerFromFiles(out));
    })();
  });
}

setup();
