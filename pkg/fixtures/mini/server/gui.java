package fixtures;

/** Minimal swing window used by the docs screenshots. */
public class gui {
    public static void main(String[] args) {
        javax.swing.JFrame frame = new javax.swing.JFrame("fixture");
        frame.setVisible(true);
    }
}
