// Reference solution for Assignment 2 (instructor upload, kind=SOLUTION).
public class SingleLinkedListSolution {
    private static class Node {
        int value;
        Node next;

        Node(int value) {
            this.value = value;
        }
    }

    private Node head;

    public void add(int value) {
        Node node = new Node(value);
        if (head == null) {
            head = node;
            return;
        }
        Node cur = head;
        while (cur.next != null) {
            cur = cur.next;
        }
        cur.next = node;
    }

    public void removeDuplicates() {
        for (Node cur = head; cur != null; cur = cur.next) {
            Node runner = cur;
            while (runner.next != null) {
                if (runner.next.value == cur.value) {
                    runner.next = runner.next.next;
                } else {
                    runner = runner.next;
                }
            }
        }
    }

    @Override
    public String toString() {
        StringBuilder sb = new StringBuilder();
        for (Node cur = head; cur != null; cur = cur.next) {
            if (sb.length() > 0) {
                sb.append(' ');
            }
            sb.append(cur.value);
        }
        return sb.toString();
    }

    public static void main(String[] args) {
        SingleLinkedListSolution list = new SingleLinkedListSolution();
        int[] values = {3, 7, 7, 9, 3};
        for (int v : values) {
            list.add(v);
        }
        System.out.println(list);
        list.removeDuplicates();
        System.out.println(list);
    }
}
