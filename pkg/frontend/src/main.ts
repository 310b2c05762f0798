import { ServiceClient } from "./api.js";
import { UiController } from "./state.js";
import { View } from "./view.js";

const SAMPLE = `type Name = String;
data Dec = Dec Name;
data Exp = Lit Int | Ref Name;
data Stat = Assign Name Exp | Skip;
data Prog = Prog Name [Dec] [Stat];
run :: Prog -> (Name, [Stat]);
run (Prog n ds ss) = (n, ss);
`;

function boot(): void {
  const api = new ServiceClient("");
  const controller = new UiController(api);
  const root = document.getElementById("app")!;
  const input = document.getElementById("module-input") as HTMLTextAreaElement;
  const openBtn = document.getElementById("open-session") as HTMLButtonElement;
  input.value = SAMPLE;
  new View(root, controller);
  openBtn.addEventListener("click", () => void controller.open(input.value));
}

document.addEventListener("DOMContentLoaded", boot);
